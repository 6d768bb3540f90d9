#ifndef RKBAYES_EXPERIMENTS_HPP
#define RKBAYES_EXPERIMENTS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "rkbayes/bayes.hpp"
#include "rkbayes/lcurve.hpp"
#include "rkbayes/synth.hpp"

// Orchestrates the numerical studies: noise sweeps with IQR statistics,
// posterior-band summaries, the Toeplitz benchmark tables, divergence-rate
// measurement and result persistence. This module owns all threading; every
// callee is pure.

namespace rkbayes::experiments {

std::string scenario_name(synth::ScenarioKind kind);       // "discretization", ...
std::string placement_name(synth::Placement placement);    // "in" | "out"

/// Linear-interpolation percentile (p in [0,1]) of an unsorted sample.
double percentile(std::vector<double> values, double p);

/// Everything about the convolution benchmark that does not depend on the
/// replicate: grids, forward matrices, both regression matrices, the pruned
/// skeleton and the identifiability decomposition.
class ConvolutionLab {
public:
    explicit ConvolutionLab(synth::ConvolutionSetup setup = synth::ConvolutionSetup::paper(),
                            double tol = 1e-12, double quad_tol = 1e-10);

    const synth::ConvolutionSetup& setup() const { return setup_; }
    const synth::ConvolutionForward& forward() const { return fwd_; }
    const model::ExplorationMeasure& rho() const { return rho_; }
    const spectral::Fsoi& fsoi() const { return fsoi_; }
    const std::vector<Index>& kept() const { return kept_; }
    Index l_full() const { return setup_.basis_size; }

    /// Pruned regression system for "discrete" or "continuous" with the
    /// replicate data folded into b_bar.
    assembly::RegressionSystem system(const std::string& mode,
                                      const model::DatasetPair& data,
                                      double sigma_eta) const;

    /// Relative L2_rho error of full-basis coefficients against the truth.
    double relative_error(const Vector& coeffs, const Vector& truth) const;

    /// Kernel values on the evaluation (measure) grid.
    Vector kernel_on_grid(const Vector& coeffs) const;

private:
    synth::ConvolutionSetup setup_;
    synth::ConvolutionForward fwd_;
    model::KernelBasis basis_;
    model::ExplorationMeasure rho_;
    Matrix phi_eval_;                 // grid x l basis values
    SymMatrix b_full_;
    std::vector<Matrix> rhat_;        // discrete forward matrices per pair
    Matrix a_discrete_, a_continuous_;
    std::vector<Index> kept_;
    spectral::Fsoi fsoi_;
    double tol_ = 1e-12;
};

struct SweepCell {
    double sigma = 0.0;
    double q25_fixed = 0.0, q50_fixed = 0.0, q75_fixed = 0.0;
    double q25_da = 0.0, q50_da = 0.0, q75_da = 0.0;
};

struct SweepResult {
    synth::ScenarioKind scenario = synth::ScenarioKind::Discretization;
    std::string mode;  // "discrete" | "continuous"
    synth::Placement placement = synth::Placement::OutOfFsoi;
    std::vector<SweepCell> cells;
    std::vector<std::vector<double>> lambda_stars;  // per sigma, per replicate
    int n_reps = 0;
    std::uint64_t seed = 0;
};

struct SweepConfig {
    synth::ScenarioKind scenario = synth::ScenarioKind::Discretization;
    std::string mode = "discrete";
    synth::Placement placement = synth::Placement::OutOfFsoi;
    std::vector<double> sigmas = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5};
    int n_reps = 200;
    std::uint64_t seed = 0;
    int threads = 0;  // 0 = available parallelism
};

/// IQR of the relative posterior-mean errors over independent replicates.
/// Matrices are assembled once; only b_bar is recomputed per replicate.
SweepResult run_noise_sweep(const ConvolutionLab& lab, const SweepConfig& config);

struct Table2Row {
    std::string dataset;
    Vector rho;
    Index fsoi_dim = 0;
    Vector eigvals;
    Matrix eigvecs;  // full-coordinate eigenvectors, one per eigenvalue
};

/// Exploration measure, FSOI dimension and operator spectrum for the three
/// benchmark Toeplitz datasets. For the degenerate dataset the reported
/// spectrum is that of the pruned regression matrix itself.
std::vector<Table2Row> run_table2();

struct Table3Row {
    Vector phi_true;
    double bias_fixed_mean = 0.0, bias_fixed_std = 0.0;
    double bias_da_mean = 0.0, bias_da_std = 0.0;
    double trace_fixed_mean = 0.0, trace_fixed_std = 0.0;
    double trace_da_mean = 0.0, trace_da_std = 0.0;
};

struct Table3Result {
    std::vector<Table3Row> rows;
    int n_reps = 0;
    double sigma = 0.0;
    std::uint64_t seed = 0;
};

/// Posterior benchmark on the Toeplitz dataset u = (1,1): relative biases of
/// both posterior means and operator traces of both covariances.
Table3Result run_table3(int n_reps = 100, double sigma = 0.1, std::uint64_t seed = 0);

struct BandsResult {
    synth::ScenarioKind scenario = synth::ScenarioKind::Discretization;
    double sigma = 0.0;
    Vector r;
    Vector phi_true, map_fixed, map_da;
    Vector q25_fixed, q75_fixed, q25_da, q75_da;
};

/// Pointwise 25th/75th posterior percentiles of the kernel on the
/// evaluation grid for one replicate, both priors.
BandsResult run_posterior_bands(const ConvolutionLab& lab, synth::ScenarioKind scenario,
                                synth::Placement placement, double sigma,
                                Index n_samples = 1000, std::uint64_t seed = 0);

struct BetaRate {
    double beta = 0.0;
    double slope = 0.0;      // log||m|| vs log sigma over the smallest sigmas
    double limit_gap = 0.0;  // ||m(sigma_min) - closed-form limit|| (beta = 1)
    double norm_ratio = 0.0; // ||m(sigma_min)|| / ||m(sigma_max)||
};

struct DivergenceResult {
    Vector sigmas;
    double fixed_slope = 0.0;        // log||m1|| vs log sigma
    double da_slope = 0.0;           // log||m1D - limit|| vs log sigma
    std::vector<BetaRate> beta_rates;
};

/// Small-noise rates on a Toeplitz system with a controlled perturbation
/// outside the range of A: the fixed posterior mean blows up like sigma^-2,
/// the data-adaptive one converges to its limit at rate sigma^2, and the
/// noise-scaled prior family follows its closed-form limits.
DivergenceResult run_divergence_rates(const std::vector<double>& betas, double c0,
                                      std::uint64_t seed = 0);

// Persistence. All numeric output is full double precision.
void write_sweep_csv(const std::string& path, const SweepResult& result);
void write_table3_json(const std::string& path, const Table3Result& result);
void write_bands_csv(const std::string& path, const BandsResult& result);
void write_lcurve_csv(const std::string& path, const lcurve::LCurve& curve);

}  // namespace rkbayes::experiments

#endif
