#ifndef RKBAYES_QUADRATURE_HPP
#define RKBAYES_QUADRATURE_HPP

#include <array>
#include <cmath>
#include <cstddef>

#include "rkbayes/types.hpp"

// Adaptive composite Gauss-Legendre quadrature: 15-point panels, bisected
// until the panel estimate stops changing within tolerance.

namespace rkbayes::quadrature {

namespace detail {

inline constexpr std::array<double, 15> gl15_nodes = {
    -9.87992518020485377e-01, -9.37273392400705951e-01, -8.48206583410427206e-01,
    -7.24417731360170070e-01, -5.70972172608538830e-01, -3.94151347077563385e-01,
    -2.01194093997434514e-01, 0.0,
    2.01194093997434514e-01,  3.94151347077563385e-01,  5.70972172608538830e-01,
    7.24417731360170070e-01,  8.48206583410427206e-01,  9.37273392400705951e-01,
    9.87992518020485377e-01};

inline constexpr std::array<double, 15> gl15_weights = {
    3.07532419961186465e-02, 7.03660474881080689e-02, 1.07159220467171773e-01,
    1.39570677926153908e-01, 1.66269205816993781e-01, 1.86161000015561878e-01,
    1.98431485327111246e-01, 2.02578241925560898e-01, 1.98431485327111246e-01,
    1.86161000015561878e-01, 1.66269205816993781e-01, 1.39570677926153908e-01,
    1.07159220467171773e-01, 7.03660474881080689e-02, 3.07532419961186465e-02};

template <class F>
double gl15(const F& f, double a, double b) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double acc = 0.0;
    for (std::size_t k = 0; k < 15; ++k)
        acc += gl15_weights[k] * f(mid + half * gl15_nodes[k]);
    return acc * half;
}

template <class F>
double adapt(const F& f, double a, double b, double whole, double tol, int depth) {
    if (depth > 48)
        throw QuadratureFailure("quadrature: refinement did not reach tolerance");
    const double mid = 0.5 * (a + b);
    const double left = gl15(f, a, mid);
    const double right = gl15(f, mid, b);
    if (std::abs(left + right - whole) <= tol) return left + right;
    return adapt(f, a, mid, left, 0.5 * tol, depth + 1) +
           adapt(f, mid, b, right, 0.5 * tol, depth + 1);
}

}  // namespace detail

/// Integral of f over [a, b] to absolute tolerance tol (scaled by the first
/// whole-interval estimate).
template <class F>
double integrate(const F& f, double a, double b, double tol = 1e-10) {
    if (!(b > a)) return 0.0;
    const double whole = detail::gl15(f, a, b);
    const double scale = std::max(1.0, std::abs(whole));
    return detail::adapt(f, a, b, whole, tol * scale, 0);
}

}  // namespace rkbayes::quadrature

#endif
