#ifndef RKBAYES_TYPES_HPP
#define RKBAYES_TYPES_HPP

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <utility>

namespace rkbayes {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Error hierarchy shared across the library. The CLI maps ConfigError to
// exit code 2 and everything else to exit code 1.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NonSymmetric : Error {
    using Error::Error;
};
struct NotPositiveDefinite : Error {
    using Error::Error;
};
struct IndefiniteMatrix : Error {
    using Error::Error;
};
struct DimensionMismatch : Error {
    using Error::Error;
};
struct AllZeroData : Error {
    using Error::Error;
};
struct EmptyBasis : Error {
    using Error::Error;
};
struct DegenerateSystem : Error {
    using Error::Error;
};
struct InsufficientRank : Error {
    using Error::Error;
};
struct QuadratureFailure : Error {
    using Error::Error;
};
struct ConfigError : Error {
    using Error::Error;
};

/// Dense symmetric matrix. Construction mirrors the lower triangle into the
/// upper one, so entries(i,j) == entries(j,i) holds exactly, bit for bit.
class SymMatrix {
public:
    SymMatrix() = default;

    explicit SymMatrix(Matrix m) : mat_(std::move(m)) {
        if (mat_.rows() != mat_.cols())
            throw DimensionMismatch("SymMatrix: matrix must be square");
        if (mat_.rows() < 1) throw DimensionMismatch("SymMatrix: n >= 1 required");
        for (Index j = 0; j < mat_.cols(); ++j)
            for (Index i = j + 1; i < mat_.rows(); ++i) mat_(j, i) = mat_(i, j);
    }

    static SymMatrix identity(Index n) { return SymMatrix(Matrix::Identity(n, n)); }
    static SymMatrix zero(Index n) { return SymMatrix(Matrix::Zero(n, n)); }
    static SymMatrix diagonal(const Vector& d) {
        return SymMatrix(Matrix(d.asDiagonal()));
    }

    Index n() const { return mat_.rows(); }
    double operator()(Index i, Index j) const { return mat_(i, j); }
    const Matrix& mat() const { return mat_; }
    operator const Matrix&() const { return mat_; }

private:
    Matrix mat_;
};

/// Result of the generalized symmetric-definite eigenproblem A V = B V Lambda
/// with V^T B V = I. Eigenvalues are sorted in descending order.
struct GeneralizedEigen {
    Vector eigvals;      // descending
    Matrix eigvecs;      // columns are B-orthonormal eigenvectors
    SymMatrix b_metric;  // the B that was used
};

/// Gaussian in coefficient space: mean vector and covariance matrix.
struct GaussianCoeff {
    Vector mean;
    SymMatrix cov;
};

}  // namespace rkbayes

#endif
