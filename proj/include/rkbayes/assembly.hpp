#ifndef RKBAYES_ASSEMBLY_HPP
#define RKBAYES_ASSEMBLY_HPP

#include <optional>
#include <string>
#include <vector>

#include "rkbayes/model.hpp"
#include "rkbayes/types.hpp"

// Builds the regression system (A_bar, b_bar, B) from data: exact Toeplitz
// matrix algebra, discrete Riemann-sum integration, or continuous quadrature
// (which deliberately injects a discretization discrepancy into b_bar).

namespace rkbayes::assembly {

struct SystemMeta {
    std::string mode;  // "toeplitz" | "discrete" | "continuous"
    Index n_pairs = 0;
    Index grid_in = 0;
    Index grid_out = 0;
    // (1/N) sum_k ||f^k||_Y^2, the constant completing the quadratic loss.
    std::optional<double> loss_const;
    // Original basis indices retained by pruning; empty means unpruned.
    std::vector<Index> kept;
    Index l_full = 0;
};

/// The inverse problem in coefficient coordinates.
struct RegressionSystem {
    SymMatrix A_bar;
    Vector b_bar;
    SymMatrix B;
    double sigma_eta = 0.0;
    SystemMeta meta;

    Index l() const { return A_bar.n(); }
};

/// Toeplitz kernel regression: A = (1/N) sum L_u^T L_u, b = (1/N) sum L_u^T f
/// over the banded stencils L_u in R^{n x (2n-1)}; B = Diag(rho).
RegressionSystem assemble_toeplitz(const std::vector<Vector>& us,
                                   const std::vector<Vector>& fs,
                                   double sigma_eta = 0.0);

/// The banded forward stencil with (L_u phi)_i = sum_j phi(i - j) u_j.
Matrix toeplitz_stencil(const Vector& u);

/// Riemann-sum forward matrix R(l,i) = sum_j phi_i(y_l - x_j) u(x_j) dx.
Matrix forward_matrix_discrete(const model::KernelBasis& basis, const Vector& u,
                               const Vector& x, double dx, const Vector& y);

/// Quadrature forward map R_psi[u](y) = int_0^1 psi(y - x) u(x) dx for an
/// analytic Gaussian input density.
double forward_quad(const std::function<double(double)>& psi,
                    const model::GaussianInput& u, double y, double tol = 1e-10);

/// Quadrature forward matrix over a y grid, one column per basis function.
Matrix forward_matrix_quad(const model::KernelBasis& basis,
                           const model::GaussianInput& u, const Vector& y,
                           double tol = 1e-10);

/// Discrete assembly: A_bar and b_bar from the same Riemann-sum forward maps
/// on the output grid, so b_bar is in Range(A_bar) for any f.
RegressionSystem assemble_discrete(const model::DatasetPair& data,
                                   const model::KernelBasis& basis,
                                   double sigma_eta = 0.0);
RegressionSystem assemble_discrete(const model::DatasetPair& data,
                                   const model::KernelBasis& basis,
                                   const model::ExplorationMeasure& rho,
                                   double sigma_eta = 0.0);

/// Continuous assembly: A_bar from adaptive quadrature over the analytic
/// inputs, b_bar still from the discrete data.
RegressionSystem assemble_continuous(const model::DatasetPair& data,
                                     const model::KernelBasis& basis,
                                     double quad_tol = 1e-10,
                                     double sigma_eta = 0.0);
RegressionSystem assemble_continuous(const model::DatasetPair& data,
                                     const model::KernelBasis& basis,
                                     const model::ExplorationMeasure& rho,
                                     double quad_tol = 1e-10,
                                     double sigma_eta = 0.0);

/// Drop basis functions with negligible L2_rho mass; kept indices land in
/// meta.kept and results can be re-embedded with model::expand_*.
RegressionSystem prune(const RegressionSystem& sys, double tol = 1e-12);

}  // namespace rkbayes::assembly

#endif
