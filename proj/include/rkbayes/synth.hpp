#ifndef RKBAYES_SYNTH_HPP
#define RKBAYES_SYNTH_HPP

#include <cstdint>
#include <vector>

#include "rkbayes/assembly.hpp"
#include "rkbayes/model.hpp"
#include "rkbayes/spectral.hpp"
#include "rkbayes/types.hpp"

// Synthetic problems: Toeplitz and convolution forward models, true-kernel
// samplers inside/outside the FSOI and the four error-injection scenarios.
//
// RNG stream convention per replicate seed: stream 1 draws kernel
// coefficients, streams 2+k draw the noise of data pair k.

namespace rkbayes::synth {

enum class ScenarioKind { Discretization, PartialObservation, ModelError, WrongNoise };

struct ErrorScenario {
    ScenarioKind kind = ScenarioKind::Discretization;
    double sigma_xi = 0.0;          // > 0 only for ModelError
    double missing_fraction = 0.25; // PartialObservation zeroes the leading quarter

    static ErrorScenario discretization() { return {ScenarioKind::Discretization, 0.0}; }
    static ErrorScenario partial_observation() {
        return {ScenarioKind::PartialObservation, 0.0};
    }
    static ErrorScenario model_error(double sigma_xi = 0.01) {
        return {ScenarioKind::ModelError, sigma_xi};
    }
    static ErrorScenario wrong_noise() { return {ScenarioKind::WrongNoise, 0.0}; }
};

enum class Placement { InFsoi, OutOfFsoi };

struct TrueKernelSpec {
    Placement placement = Placement::OutOfFsoi;
    Index n_modes = 3;  // leading eigenmodes used for InFsoi draws
};

/// The convolution benchmark: three Gaussian input densities with means
/// -1.0, -0.4, 0.2 and variance 1/15, observed on uniform grids of [0,1]
/// with J input and L output points, cubic B-splines on [-1,1].
struct ConvolutionSetup {
    Index J = 100;
    Index L = 50;
    Index basis_size = 20;
    int degree = 3;
    std::vector<model::GaussianInput> inputs;

    static ConvolutionSetup paper();

    model::KernelBasis basis() const;
    Vector x_grid() const;
    Vector y_grid() const;
    double dx() const { return 1.0 / static_cast<double>(J); }
    double dy() const { return 1.0 / static_cast<double>(L); }
};

/// Precomputed forward maps of one setup: quadrature matrices for data
/// generation and the inputs sampled on both grids.
struct ConvolutionForward {
    std::vector<Matrix> r_quad;   // per pair: L x l quadrature forward matrix
    std::vector<Vector> u_on_x;   // inputs on the input grid
    std::vector<Vector> u_on_y;   // inputs on the output grid (model error term)

    static ConvolutionForward build(const ConvolutionSetup& setup, double quad_tol = 1e-10);
};

/// f^k(y_l) = R_phi[u^k](y_l) + eta + xi under the given scenario. Gaussian
/// noise has variance sigma^2/dy per grid point; WrongNoise draws uniform
/// with the same variance; ModelError adds sigma_xi * u|u|;
/// PartialObservation zeroes the first floor(L/4) observations.
model::DatasetPair gen_convolution_dataset(const ConvolutionSetup& setup,
                                           const ConvolutionForward& fwd,
                                           const ErrorScenario& scenario,
                                           const Vector& phi_coeffs, double sigma_eta,
                                           std::uint64_t seed);
model::DatasetPair gen_convolution_dataset(const ErrorScenario& scenario,
                                           const Vector& phi_coeffs, double sigma_eta,
                                           std::uint64_t seed);

/// f^k = L_{u^k} phi_true + eta with i.i.d. N(0, sigma^2) entries, plus the
/// optional cubic model error sigma_xi * u |u|^2.
std::vector<Vector> gen_toeplitz_dataset(const std::vector<Vector>& us,
                                         const Vector& phi_true, double sigma_eta,
                                         std::uint64_t seed, double sigma_xi = 0.0);

/// Coefficients of a random true kernel in the full basis. OutOfFsoi draws
/// N(0, I); InFsoi draws along the leading eigenvectors and re-embeds
/// through the kept-index map.
Vector sample_true_kernel(const TrueKernelSpec& spec, const spectral::Fsoi& fsoi,
                          Index l_full, const std::vector<Index>& kept,
                          std::uint64_t seed);

}  // namespace rkbayes::synth

#endif
