#include <doctest.h>

#include <cmath>

#include "rkbayes/assembly.hpp"
#include "rkbayes/linalg.hpp"
#include "rkbayes/spectral.hpp"
#include "test_helpers.hpp"

using namespace rkbayes;
using namespace rkbayes::spectral;
using test_helpers::random_spd;
using test_helpers::random_vector;

namespace {

Vector vec2(double a, double b) { return (Vector(2) << a, b).finished(); }

assembly::RegressionSystem toeplitz_system(const std::vector<Vector>& us) {
    std::vector<Vector> fs(us.size(), Vector::Zero(us.front().size()));
    return assembly::assemble_toeplitz(us, fs);
}

}  // namespace

TEST_CASE("decompose finds the FSOI of the singular benchmark dataset") {
    const auto sys = toeplitz_system({vec2(1, 1)});
    const auto fsoi = decompose(sys.A_bar, sys.B);
    CHECK(fsoi.K == 2);
    CHECK(fsoi.eigvals()(0) == doctest::Approx(8.0).epsilon(1e-12));
    CHECK(fsoi.eigvals()(1) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(std::abs(fsoi.eigvals()(2)) < 1e-12);

    // FSOI = span{(1,1,1), (-sqrt2,0,sqrt2)}
    const Vector psi1 = fsoi.eigvecs().col(0);
    CHECK((psi1 - Vector::Ones(3)).norm() < 1e-10);
}

TEST_CASE("decompose of a well-posed dataset spans everything") {
    const auto sys = toeplitz_system({vec2(1, 0), vec2(0, 1)});
    const auto fsoi = decompose(sys.A_bar, sys.B);
    CHECK(fsoi.K == 3);
    CHECK((fsoi.eigvals() - 2.0 * Vector::Ones(3)).norm() < 1e-12);
}

TEST_CASE("decompose rejects the zero operator") {
    CHECK_THROWS_AS(decompose(SymMatrix::zero(3), SymMatrix::identity(3)),
                    DegenerateSystem);
}

TEST_CASE("rkhs_gram identities") {
    CHECK((rkhs_gram(SymMatrix::identity(3), SymMatrix::identity(3)).mat() -
           Matrix::Identity(3, 3))
              .norm() < 1e-14);

    const auto sys = toeplitz_system({vec2(1, 0), vec2(0, 1)});
    const auto g = rkhs_gram(sys.A_bar, sys.B);
    const Vector expected = (Vector(3) << 0.125, 0.25, 0.125).finished();
    CHECK((g.mat() - Matrix(expected.asDiagonal())).norm() < 1e-14);
}

TEST_CASE("rkhs norm equals the spectral sum on a random full-rank system") {
    const SymMatrix a = random_spd(5, 9, 0.2, 1);
    const SymMatrix b = random_spd(5, 9, 0.7, 2);
    const auto fsoi = decompose(a, b);
    const auto gram = rkhs_gram(a, b);

    const Vector c = random_vector(5, 10);
    const Vector z = fsoi.eigvecs().transpose() * (b.mat() * c);  // <phi, psi_i>
    double expected = 0.0;
    for (Index i = 0; i < 5; ++i) expected += z(i) * z(i) / fsoi.eigvals()(i);
    CHECK(c.dot(gram.mat() * c) == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("rkhs_gram is a pseudo-identity against B^-1 A B^-1") {
    for (bool rank_deficient : {false, true}) {
        const auto sys = rank_deficient ? toeplitz_system({vec2(1, 1)})
                                        : toeplitz_system({vec2(1, 0), vec2(0, 1)});
        const Matrix g = rkhs_gram(sys.A_bar, sys.B).mat();
        const Matrix binv = sys.B.mat().inverse();
        const Matrix m = binv * sys.A_bar.mat() * binv;
        CHECK((g * m * g - g).norm() < 1e-8 * std::max(1.0, g.norm()));
    }
}

TEST_CASE("trace identities on the benchmark datasets") {
    {
        const auto sys = toeplitz_system({vec2(1, 1)});
        const auto fsoi = decompose(sys.A_bar, sys.B);
        CHECK(trace_lg(fsoi) == doctest::Approx(12.0).epsilon(1e-12));
        const auto rho = model::toeplitz_measure({vec2(1, 1)});
        CHECK(gbar_trace({vec2(1, 1)}, rho) == doctest::Approx(12.0).epsilon(1e-10));
    }
    {
        const auto sys = toeplitz_system({vec2(1, 0), vec2(0, 1)});
        const auto fsoi = decompose(sys.A_bar, sys.B);
        CHECK(trace_lg(fsoi) == doctest::Approx(6.0).epsilon(1e-12));
        const auto rho = model::toeplitz_measure({vec2(1, 0), vec2(0, 1)});
        CHECK(gbar_trace({vec2(1, 0), vec2(0, 1)}, rho) ==
              doctest::Approx(6.0).epsilon(1e-10));
    }
}

TEST_CASE("one-atom trace is G(r,r)/rho(r)") {
    // single pair, n = 1: S = {0}, rho = {1}, G(0,0) = u^2
    const std::vector<Vector> us = {(Vector(1) << 3.0).finished()};
    const auto rho = model::toeplitz_measure(us);
    CHECK(gbar_trace(us, rho) == doctest::Approx(9.0).epsilon(1e-12));
}

TEST_CASE("eigenvalue sum equals trace(B^-1 A) on random systems") {
    for (std::uint64_t seed : {40u, 41u}) {
        const SymMatrix a = random_spd(6, seed, 0.0, 1);
        const SymMatrix b = random_spd(6, seed, 0.6, 2);
        const auto fsoi = decompose(a, b);
        const double tr = b.mat().llt().solve(a.mat()).trace();
        CHECK(trace_lg(fsoi) == doctest::Approx(tr).epsilon(1e-10));
    }
}

TEST_CASE("coeff_cov_operator_trace equals trace(QB)") {
    const SymMatrix b0 = SymMatrix::diagonal((Vector(3) << 0.25, 0.5, 0.25).finished());
    CHECK(coeff_cov_operator_trace(SymMatrix::identity(3), b0) ==
          doctest::Approx(1.0).epsilon(1e-12));

    for (std::uint64_t seed : {50u, 51u, 52u}) {
        const SymMatrix q = random_spd(4, seed, 0.0, 1);
        const SymMatrix b = random_spd(4, seed, 0.5, 2);
        const double expected = (q.mat() * b.mat()).trace();
        CHECK(coeff_cov_operator_trace(q, b) == doctest::Approx(expected).epsilon(1e-12));
    }
}
