#ifndef RKBAYES_RNG_HPP
#define RKBAYES_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>

// Counter-based random numbers: every draw is a pure function of
// (seed, stream, counter), so identical seeds give identical sample streams
// regardless of run, thread count or scheduling. Replicates own disjoint
// streams and parallel sampling partitions by sample index.

namespace rkbayes::rng {

inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Uniform double in (0,1], pure in (seed, stream, counter).
inline double uniform_at(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    const std::uint64_t bits = mix64(mix64(mix64(seed) ^ stream) ^ counter);
    return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

/// Standard normal via Box-Muller; consumes counters 2k and 2k+1.
inline double normal_at(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    const double u1 = uniform_at(seed, stream, 2 * counter);
    const double u2 = uniform_at(seed, stream, 2 * counter + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

/// Stateful view over one stream; advancing the counter is the only state.
class Stream {
public:
    Stream(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

    double uniform() { return uniform_at(seed_, stream_, counter_++); }
    double normal() { return normal_at(seed_, stream_, counter_++); }

    /// Uniform on [-w, w].
    double uniform_sym(double w) { return w * (2.0 * uniform() - 1.0); }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
};

}  // namespace rkbayes::rng

#endif
