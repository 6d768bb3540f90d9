#ifndef RKBAYES_MODEL_HPP
#define RKBAYES_MODEL_HPP

#include <functional>
#include <vector>

#include "rkbayes/types.hpp"

// Hypothesis-space bases over the kernel support, exploration measures built
// from data, the basis Gram matrix B and discrete evaluation of the forward
// map R_phi[u].

namespace rkbayes::model {

enum class BasisKind { Dirac, BSpline };

/// Basis {phi_i} of the hypothesis space over the support S. Dirac for
/// discrete kernels, clamped uniform B-splines for continuous ones.
class KernelBasis {
public:
    /// Dirac (Kronecker delta) basis on the given grid points.
    static KernelBasis dirac(Vector points);

    /// size_basis clamped B-splines of the given degree with uniform knots on
    /// [lo, hi]; size_basis = (#interior spans) + degree.
    static KernelBasis bspline(double lo, double hi, Index size_basis, int degree = 3);

    BasisKind kind() const { return kind_; }
    Index size() const { return l_; }
    int degree() const { return degree_; }
    double lo() const { return lo_; }
    double hi() const { return hi_; }
    const Vector& points() const { return points_; }

    /// phi_i(r). Dirac basis matches grid points exactly.
    double eval(Index i, double r) const;

    /// All basis values at r as a length-l vector.
    Vector eval_all(double r) const;

private:
    KernelBasis() = default;

    BasisKind kind_ = BasisKind::Dirac;
    Index l_ = 0;
    int degree_ = 0;
    double lo_ = 0.0, hi_ = 0.0;
    Vector points_;                // Dirac grid
    std::vector<double> knots_;    // BSpline knot vector
};

enum class MeasureKind { Atomic, Density };

/// Probability weights rho on the support S. Density-kind measures store
/// density times cell width, so both kinds act as weight vectors downstream.
struct ExplorationMeasure {
    Vector points;
    Vector weights;  // >= 0, sum to 1
    MeasureKind kind = MeasureKind::Atomic;
    double cell = 0.0;  // grid spacing for density kind
};

struct GaussianInput {
    double mean = 0.0;
    double var = 1.0;

    double density(double x) const;
    double cdf(double x) const;  // integral of the density up to x
};

/// Input-output pairs sampled on shared uniform grids.
struct DatasetPair {
    Vector x;  // input grid, J points
    Vector y;  // output grid, L points
    std::vector<Vector> u;
    std::vector<Vector> f;
    double dx = 0.0;
    double dy = 0.0;
    // Analytic input densities when the inputs are known in closed form
    // (enables quadrature assembly); not serialized.
    std::vector<GaussianInput> analytic;

    Index n_pairs() const { return static_cast<Index>(u.size()); }
    void validate() const;
};

/// Exploration measure of Toeplitz data {u^k in R^n} on S = {1-n,...,n-1}:
/// rho(r) proportional to sum_k sum_{i-j=r} |u^k_j|, normalized to mass 1.
ExplorationMeasure toeplitz_measure(const std::vector<Vector>& us);

/// Exploration measure of convolution data on a uniform grid over [-1,1]:
/// rho(r) proportional to sum_k int_{[0,1] cap [r,r+1]} |u^k|, evaluated by
/// Riemann sum on the input grid.
ExplorationMeasure convolution_measure(const DatasetPair& data, Index n_pts = 201);

/// Gram matrix B(i,j) = sum_r phi_i(r) phi_j(r) w(r). Equals Diag(rho)
/// exactly for the Dirac basis on the measure grid.
SymMatrix basis_matrix(const KernelBasis& basis, const ExplorationMeasure& rho);

struct PrunedSystem {
    SymMatrix B;
    SymMatrix A;
    Vector b;
    std::vector<Index> kept;  // indices into the original basis
};

/// Drops basis index i when B(i,i) <= tol * max_j B(j,j); the remaining B is
/// positive definite and `kept` maps results back to the original indexing.
PrunedSystem prune_basis(const SymMatrix& B, const SymMatrix& A, const Vector& b,
                         double tol = 1e-12);

/// Re-embed pruned coefficients into the original indexing (dropped entries 0).
Vector expand_vector(const Vector& v, const std::vector<Index>& kept, Index l_full);
Matrix expand_matrix(const Matrix& m, const std::vector<Index>& kept, Index l_full);

/// Riemann-sum forward map: R[u](y) = sum_j psi(y - x_j) u(x_j) dx.
double eval_forward_discrete(const std::function<double(double)>& psi, const Vector& u,
                             const Vector& x, double dx, double y);

}  // namespace rkbayes::model

#endif
