#ifndef RKBAYES_BAYES_HPP
#define RKBAYES_BAYES_HPP

#include <cstdint>
#include <utility>

#include "rkbayes/assembly.hpp"
#include "rkbayes/types.hpp"

// Priors and posteriors in coefficient space: the fixed non-degenerate
// prior, the noise-scaled family and the data-adaptive RKHS prior, plus
// posterior sampling and the closed-form expected-MSE and trace formulas.

namespace rkbayes::bayes {

/// Regularized solves through D = B^{-1} A^{1/2}:
///   solve(b, t)  = D (D^T A D + t I)^{-1} D^T b
///   cov(t)       = D (D^T A D + t I)^{-1} D^T
/// This never forms pinv(A) and handles rank-deficient A natively, with the
/// result supported on the identifiable subspace.
class StabilizedSolver {
public:
    StabilizedSolver(const SymMatrix& A, const SymMatrix& B, double tol = 1e-12);

    Vector solve(const Vector& b, double t) const;
    Matrix cov(double t) const;

private:
    Matrix du_;   // D * U with U the eigenvectors of D^T A D
    Vector g_;    // eigenvalues of D^T A D
};

/// Posterior for the standard coefficient prior N(0, I):
/// mean (A + sigma^2 I)^{-1} b, covariance sigma^2 (A + sigma^2 I)^{-1}.
GaussianCoeff fixed_posterior(const assembly::RegressionSystem& sys);

/// Data-adaptive prior N(0, lambda_star^{-1} B^{-1} A B^{-1}).
GaussianCoeff da_prior(const assembly::RegressionSystem& sys, double lambda_star);

/// Data-adaptive posterior, computed through the stabilized factorization:
/// Q = sigma^2 D (D^T A D + sigma^2 lambda_star I)^{-1} D^T, m = sigma^{-2} Q b.
GaussianCoeff da_posterior(const assembly::RegressionSystem& sys, double lambda_star);

/// Posterior mean under the noise-scaled prior N(0, lambda Q0) with
/// lambda = C0 sigma^{2 beta}: m = (A + sigma^2 lambda^{-1} Q0^{-1})^{-1} b.
Vector scaled_posterior_mean(const assembly::RegressionSystem& sys, const SymMatrix& Q0,
                             double c0, double beta);

/// n i.i.d. draws m + S z with S = psd_sqrt(Q); one row per sample.
/// Deterministic per seed; sample i depends only on (seed, i).
Matrix sample_posterior(const GaussianCoeff& g, Index n, std::uint64_t seed);

/// Spectral inputs for the closed-form error and trace formulas: operator
/// eigenvalues, fixed-prior spectrum r_i, model-error components eps_xi,
/// noise level, prior hyper-parameter and FSOI dimension.
struct SpectralErrorBudget {
    Vector lambda;
    Vector r;
    Vector eps_xi;
    double sigma = 0.0;
    double lambda_star = 1.0;
    Index K = 0;

    void validate() const;
};

/// E ||mu1^D - phi_true||^2 for phi_true drawn from the data-adaptive prior:
/// sum_{i<=K} (l_i + s^2 L / l_i)^{-2} [s^2 (l_i + s^2 L^2 / l_i) + eps_i^2].
double expected_mse_da(const SpectralErrorBudget& budget);

/// E ||mu1 - phi_true||^2 for phi_true drawn from the fixed prior:
/// sum_{i<=K} (l_i + s^2/r_i)^{-2} [s^2 l_i + s^4/r_i + eps_i^2]
///   + sum_{i>K} [r_i + s^{-4} r_i^2 eps_i^2].
double expected_mse_fixed(const SpectralErrorBudget& budget);

/// (trace of the DA posterior covariance, trace of the fixed one):
/// sum_{i<=K} s^2 (l_i + s^2 L / l_i)^{-1}  and
/// sum_{i<=K} s^2 (l_i + s^2 / r_i)^{-1} + sum_{i>K} r_i.
std::pair<double, double> posterior_traces(const SpectralErrorBudget& budget);

}  // namespace rkbayes::bayes

#endif
