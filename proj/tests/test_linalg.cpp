#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "rkbayes/linalg.hpp"
#include "test_helpers.hpp"

using namespace rkbayes;
using test_helpers::random_psd_rank;
using test_helpers::random_spd;
using test_helpers::random_vector;

namespace {

Matrix toeplitz3() {
    Matrix a(3, 3);
    a << 1, 1, 0, 1, 2, 1, 0, 1, 1;
    return a;
}

}  // namespace

TEST_CASE("gen_eig reproduces the benchmark 3x3 pencil") {
    const SymMatrix a(toeplitz3());
    const SymMatrix b = SymMatrix::diagonal((Vector(3) << 0.25, 0.5, 0.25).finished());
    const auto ge = linalg::gen_eig(a, b);

    CHECK(ge.eigvals(0) == doctest::Approx(8.0).epsilon(1e-12));
    CHECK(ge.eigvals(1) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(std::abs(ge.eigvals(2)) < 1e-12);

    // (1,1,1), (-sqrt2,0,sqrt2), (1,-1,1) after the positive-first-entry
    // sign convention.
    const double s = std::sqrt(2.0);
    Matrix expected(3, 3);
    expected << 1, s, 1, 1, 0, -1, 1, -s, 1;
    CHECK((ge.eigvecs - expected).norm() < 1e-10);

    CHECK((a.mat() * ge.eigvecs - b.mat() * ge.eigvecs * ge.eigvals.asDiagonal()).norm() <
          1e-10 * a.mat().norm());
    CHECK((ge.eigvecs.transpose() * b.mat() * ge.eigvecs - Matrix::Identity(3, 3)).norm() <
          1e-10);
}

TEST_CASE("gen_eig identity case") {
    const auto ge = linalg::gen_eig(SymMatrix::identity(3), SymMatrix::identity(3));
    CHECK((ge.eigvals - Vector::Ones(3)).norm() < 1e-14);
    CHECK((ge.eigvecs - Matrix::Identity(3, 3)).norm() < 1e-14);
}

TEST_CASE("gen_eig agrees with the whiten-then-eig oracle") {
    const Index n = 5;
    const SymMatrix a = random_spd(n, 11, 0.2, 1);
    const SymMatrix b = random_spd(n, 12, 0.8, 2);

    // Oracle: standard symmetric eigendecomposition of B^{-1/2} A B^{-1/2},
    // eigenvectors mapped by B^{-1/2}.
    Eigen::SelfAdjointEigenSolver<Matrix> bes(b.mat());
    const Matrix b_inv_sqrt = bes.operatorInverseSqrt();
    Eigen::SelfAdjointEigenSolver<Matrix> ces(Matrix(b_inv_sqrt * a.mat() * b_inv_sqrt));

    const auto ge = linalg::gen_eig(a, b);
    const Vector oracle_vals = ces.eigenvalues().reverse();
    CHECK((ge.eigvals - oracle_vals).norm() < 1e-10 * oracle_vals.norm());

    const Matrix oracle_vecs = b_inv_sqrt * ces.eigenvectors().rowwise().reverse();
    for (Index j = 0; j < n; ++j) {
        const Vector v = ge.eigvecs.col(j);
        Vector w = oracle_vecs.col(j);
        if (v.dot(w) < 0.0) w = -w;
        CHECK((v - w).norm() < 1e-8);
    }
}

TEST_CASE("gen_eig rejects bad inputs") {
    Matrix asym(2, 2);
    asym << 1, 2, 0, 1;
    CHECK_THROWS_AS(linalg::gen_eig(asym, Matrix::Identity(2, 2)), NonSymmetric);

    Matrix indef(2, 2);
    indef << 1, 0, 0, -1;
    CHECK_THROWS_AS(linalg::gen_eig(Matrix::Identity(2, 2), indef), NotPositiveDefinite);
}

TEST_CASE("gen_eig eigenvalue sum matches trace(B^-1 A)") {
    for (std::uint64_t seed : {3u, 4u, 5u}) {
        const SymMatrix a = random_spd(6, seed, 0.1, 1);
        const SymMatrix b = random_spd(6, seed, 0.5, 2);
        const auto ge = linalg::gen_eig(a, b);
        const double tr = (b.mat().llt().solve(a.mat())).trace();
        CHECK(ge.eigvals.sum() == doctest::Approx(tr).epsilon(1e-10));
    }
}

TEST_CASE("psd_sqrt on diagonal and zero matrices") {
    const auto s = linalg::psd_sqrt(SymMatrix::diagonal((Vector(2) << 4, 9).finished()));
    CHECK((s.mat() - (Vector(2) << 2, 3).finished().asDiagonal().toDenseMatrix()).norm() <
          1e-14);
    const auto z = linalg::psd_sqrt(SymMatrix::zero(3));
    CHECK(z.mat().norm() == 0.0);
}

TEST_CASE("psd_sqrt reconstructs a random SPD matrix") {
    const SymMatrix a = random_spd(4, 21);
    const auto s = linalg::psd_sqrt(a);
    CHECK((s.mat() * s.mat() - a.mat()).norm() < 1e-10 * a.mat().norm());
    // commutes with A
    CHECK((s.mat() * a.mat() - a.mat() * s.mat()).norm() <
          1e-9 * a.mat().norm() * a.mat().norm());
}

TEST_CASE("psd_sqrt rejects indefinite input") {
    Matrix indef(2, 2);
    indef << 1, 0, 0, -0.5;
    CHECK_THROWS_AS(linalg::psd_sqrt(indef), IndefiniteMatrix);
}

TEST_CASE("pinv on diagonal matrices") {
    const auto p = linalg::pinv(SymMatrix::diagonal((Vector(2) << 2, 0).finished()));
    CHECK((p.mat() - (Vector(2) << 0.5, 0).finished().asDiagonal().toDenseMatrix()).norm() <
          1e-14);
    const auto pi = linalg::pinv(SymMatrix::identity(3));
    CHECK((pi.mat() - Matrix::Identity(3, 3)).norm() < 1e-14);
}

TEST_CASE("pinv(A3) A3 is the projector onto the range") {
    const SymMatrix a(toeplitz3());
    // Range of A3 is spanned by the orthogonal pair (1,2,1) and (1,0,-1).
    Vector v1 = (Vector(3) << 1, 2, 1).finished().normalized();
    Vector v2 = (Vector(3) << 1, 0, -1).finished().normalized();
    const Matrix projector = v1 * v1.transpose() + v2 * v2.transpose();
    CHECK((linalg::pinv(a).mat() * a.mat() - projector).norm() < 1e-12);
}

TEST_CASE("pinv satisfies the Moore-Penrose identities on random PSD input") {
    for (Index rank : {2, 4}) {
        const SymMatrix a = random_psd_rank(4, rank, 31);
        const Matrix p = linalg::pinv(a).mat();
        CHECK((a.mat() * p * a.mat() - a.mat()).norm() < 1e-10 * a.mat().norm());
        CHECK((linalg::pinv(SymMatrix(p)).mat() - a.mat()).norm() < 1e-8 * a.mat().norm());
    }
}

TEST_CASE("range_residual distinguishes range and orthogonal directions") {
    const SymMatrix a = SymMatrix::diagonal((Vector(2) << 1, 0).finished());
    CHECK(linalg::range_residual(a, (Vector(2) << 3, 0).finished()) < 1e-14);
    CHECK(linalg::range_residual(a, (Vector(2) << 0, 1).finished()) ==
          doctest::Approx(1.0).epsilon(1e-14));
    CHECK_THROWS_AS(linalg::range_residual(a, Vector::Zero(3)), DimensionMismatch);
}
