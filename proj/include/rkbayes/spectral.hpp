#ifndef RKBAYES_SPECTRAL_HPP
#define RKBAYES_SPECTRAL_HPP

#include <vector>

#include "rkbayes/model.hpp"
#include "rkbayes/types.hpp"

// Spectral analysis of the normal operator in the chosen basis:
// eigen-decomposition via the (A, B) pencil, FSOI extraction, the RKHS Gram
// matrix and operator-level traces.

namespace rkbayes::spectral {

/// Spectrum of the normal operator plus the number K of eigenpairs above the
/// identifiability threshold. Eigenfunctions are psi_k = sum_j V(j,k) phi_j,
/// orthonormal in L2_rho.
struct Fsoi {
    Index K = 0;
    GeneralizedEigen eig;
    double tol = 0.0;

    const Vector& eigvals() const { return eig.eigvals; }
    const Matrix& eigvecs() const { return eig.eigvecs; }
};

/// Generalized eigen-decomposition of (A, B) with K counting eigenvalues
/// above tol * lambda_1. Throws DegenerateSystem when the operator vanishes.
Fsoi decompose(const SymMatrix& A, const SymMatrix& B, double tol = 1e-12);

/// Gram matrix of the basis in the RKHS norm: B_rkhs = B pinv(A) B.
SymMatrix rkhs_gram(const SymMatrix& A, const SymMatrix& B, double tol = 1e-12);

/// Operator trace as the eigenvalue sum.
double trace_lg(const Fsoi& fsoi);

/// Independent trace route: sum of G(r,r)/rho(r) over the support of rho.
/// Atomic (Toeplitz) flavor.
double gbar_trace(const std::vector<Vector>& us, const model::ExplorationMeasure& rho);
/// Density (convolution) flavor, Riemann sums on the data grid.
double gbar_trace(const model::DatasetPair& data, const model::ExplorationMeasure& rho);

/// Trace of the operator-level covariance behind a coefficient covariance Q:
/// the eigenvalue sum of the (BQB, B) pencil, equal to trace(QB).
double coeff_cov_operator_trace(const SymMatrix& Q, const SymMatrix& B);

}  // namespace rkbayes::spectral

#endif
