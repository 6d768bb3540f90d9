#ifndef RKBAYES_LINALG_HPP
#define RKBAYES_LINALG_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

#include "rkbayes/types.hpp"

// Dense symmetric kernels shared by all modules: generalized
// symmetric-definite eigensolver, PSD square root, tolerance-based
// pseudo-inverse and range-space projection. Free functions accept any
// Eigen dense expression.

namespace rkbayes::linalg {

inline constexpr double default_tol = 1e-12;

template <class Derived>
bool is_symmetric(const Eigen::MatrixBase<Derived>& a, double tol = 1e-10) {
    if (a.rows() != a.cols()) return false;
    const double scale = std::max(1.0, a.template lpNorm<Eigen::Infinity>());
    return (a - a.transpose()).template lpNorm<Eigen::Infinity>() <= tol * scale;
}

namespace detail {

template <class Derived>
Matrix require_symmetric(const Eigen::MatrixBase<Derived>& a, const char* what) {
    if (!is_symmetric(a))
        throw NonSymmetric(std::string(what) + ": matrix is not symmetric");
    return ((a + a.transpose()) * 0.5).eval();
}

// Column sign convention: the first entry with magnitude above 1e-8 is made
// positive, so eigenvector tables are reproducible.
inline void fix_column_signs(Matrix& v) {
    for (Index j = 0; j < v.cols(); ++j) {
        for (Index i = 0; i < v.rows(); ++i) {
            if (std::abs(v(i, j)) > 1e-8) {
                if (v(i, j) < 0.0) v.col(j) = -v.col(j);
                break;
            }
        }
    }
}

}  // namespace detail

/// Solves A V = B V Lambda with V^T B V = I for symmetric PSD A and
/// symmetric PD B, by Cholesky whitening of B. Eigenvalues descending.
template <class DerivedA, class DerivedB>
GeneralizedEigen gen_eig(const Eigen::MatrixBase<DerivedA>& a_in,
                         const Eigen::MatrixBase<DerivedB>& b_in,
                         double tol = default_tol) {
    if (a_in.rows() != b_in.rows() || a_in.cols() != b_in.cols())
        throw DimensionMismatch("gen_eig: A and B sizes differ");
    const Matrix a = detail::require_symmetric(a_in, "gen_eig(A)");
    const Matrix b = detail::require_symmetric(b_in, "gen_eig(B)");

    Eigen::SelfAdjointEigenSolver<Matrix> bes(b, Eigen::EigenvaluesOnly);
    const double bmax = bes.eigenvalues().maxCoeff();
    const double bmin = bes.eigenvalues().minCoeff();
    if (!(bmin > tol * bmax))
        throw NotPositiveDefinite("gen_eig: B is not positive definite");

    Eigen::LLT<Matrix> llt(b);
    if (llt.info() != Eigen::Success)
        throw NotPositiveDefinite("gen_eig: Cholesky of B failed");
    const Matrix l = llt.matrixL();

    // C = L^{-1} A L^{-T}, then eigenvectors map back through L^{-T}.
    Matrix c = l.triangularView<Eigen::Lower>().solve(a);
    c = l.triangularView<Eigen::Lower>().solve(c.transpose().eval());
    c = (c + c.transpose()).eval() * 0.5;

    Eigen::SelfAdjointEigenSolver<Matrix> ces(c);
    if (ces.info() != Eigen::Success)
        throw Error("gen_eig: symmetric eigensolver failed");

    const Index n = a.rows();
    GeneralizedEigen out;
    out.eigvals = ces.eigenvalues().reverse();
    Matrix u = ces.eigenvectors().rowwise().reverse();
    out.eigvecs = l.transpose().triangularView<Eigen::Upper>().solve(u);
    detail::fix_column_signs(out.eigvecs);
    out.b_metric = SymMatrix(b);
    (void)n;
    return out;
}

inline GeneralizedEigen gen_eig(const SymMatrix& a, const SymMatrix& b,
                                double tol = default_tol) {
    return gen_eig(a.mat(), b.mat(), tol);
}

/// Symmetric PSD square root; eigenvalues within -tol*lambda_max of zero are
/// clamped to zero.
template <class Derived>
SymMatrix psd_sqrt(const Eigen::MatrixBase<Derived>& a_in, double tol = default_tol) {
    const Matrix a = detail::require_symmetric(a_in, "psd_sqrt");
    Eigen::SelfAdjointEigenSolver<Matrix> es(a);
    Vector d = es.eigenvalues();
    const double dmax = std::max(d.maxCoeff(), 0.0);
    if (d.minCoeff() < -tol * dmax)
        throw IndefiniteMatrix("psd_sqrt: matrix has a negative eigenvalue");
    for (Index i = 0; i < d.size(); ++i) d(i) = std::sqrt(std::max(d(i), 0.0));
    Matrix s = es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
    return SymMatrix(std::move(s));
}

inline SymMatrix psd_sqrt(const SymMatrix& a, double tol = default_tol) {
    return psd_sqrt(a.mat(), tol);
}

/// Moore-Penrose pseudo-inverse of a symmetric PSD matrix; eigenvalues at or
/// below tol*lambda_max are treated as zero.
template <class Derived>
SymMatrix pinv(const Eigen::MatrixBase<Derived>& a_in, double tol = default_tol) {
    const Matrix a = detail::require_symmetric(a_in, "pinv");
    Eigen::SelfAdjointEigenSolver<Matrix> es(a);
    Vector d = es.eigenvalues();
    const double dmax = std::max(d.maxCoeff(), 0.0);
    const double cut = tol * dmax;
    for (Index i = 0; i < d.size(); ++i) d(i) = d(i) > cut ? 1.0 / d(i) : 0.0;
    Matrix p = es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
    return SymMatrix(std::move(p));
}

inline SymMatrix pinv(const SymMatrix& a, double tol = default_tol) {
    return pinv(a.mat(), tol);
}

/// Relative norm of the component of b outside Range(A):
/// ||(I - P) b||_2 / max(||b||_2, eps) with P projecting onto eigenvectors
/// with lambda > tol*lambda_max.
template <class DerivedA, class DerivedB>
double range_residual(const Eigen::MatrixBase<DerivedA>& a_in,
                      const Eigen::MatrixBase<DerivedB>& b,
                      double tol = default_tol) {
    if (a_in.rows() != b.size())
        throw DimensionMismatch("range_residual: size of b does not match A");
    const Matrix a = detail::require_symmetric(a_in, "range_residual");
    Eigen::SelfAdjointEigenSolver<Matrix> es(a);
    const Vector& d = es.eigenvalues();
    const double cut = tol * std::max(d.maxCoeff(), 0.0);
    Vector bv = b.template cast<double>();
    Vector proj = Vector::Zero(bv.size());
    for (Index i = 0; i < d.size(); ++i) {
        if (d(i) > cut) {
            const Vector u = es.eigenvectors().col(i);
            proj += u.dot(bv) * u;
        }
    }
    const double eps = std::numeric_limits<double>::epsilon();
    return (bv - proj).norm() / std::max(bv.norm(), eps);
}

inline double range_residual(const SymMatrix& a, const Vector& b,
                             double tol = default_tol) {
    return range_residual(a.mat(), b, tol);
}

}  // namespace rkbayes::linalg

#endif
