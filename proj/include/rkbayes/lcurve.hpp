#ifndef RKBAYES_LCURVE_HPP
#define RKBAYES_LCURVE_HPP

#include "rkbayes/assembly.hpp"
#include "rkbayes/types.hpp"

// Hyper-parameter selection by L-curve curvature maximization: the curve
// traces the loss part x(lambda) against the RKHS-regularizer part
// y(lambda) of the regularized solve over a log-spaced grid.

namespace rkbayes::lcurve {

struct LCurve {
    Vector lambdas;       // strictly increasing, log-spaced
    Vector x;             // sqrt of the loss part
    Vector y;             // sqrt of the regularizer part
    Vector kappa;         // log-log curvature (0 at the endpoints)
    double lambda_star = 0.0;
    double loss_shift = 0.0;  // additive constant used inside x(lambda)^2
};

/// Regularized coefficient solve c = (A + lambda B A^{-1} B)^{-1} b through
/// the stabilized factorization (pinv(A) is never formed).
Vector solve_at(const assembly::RegressionSystem& sys, double lambda);

/// Default log-spaced grid between the smallest and largest generalized
/// eigenvalues of (A, B); the lower end is clamped at 1e-14 * lambda_max when
/// the smallest eigenvalue is numerically zero.
Vector default_grid(const assembly::RegressionSystem& sys, Index n_grid = 100);

/// Evaluate both curve coordinates and the curvature over the grid and pick
/// the maximum-curvature corner (flat curves fall back to the smallest
/// grid point).
LCurve curve_points(const assembly::RegressionSystem& sys, const Vector& grid);

/// Corner of the default grid.
double select_lambda(const assembly::RegressionSystem& sys, Index n_grid = 100);

}  // namespace rkbayes::lcurve

#endif
