#include <doctest.h>

#include <cmath>

#include "rkbayes/assembly.hpp"
#include "rkbayes/linalg.hpp"
#include "rkbayes/synth.hpp"
#include "test_helpers.hpp"

using namespace rkbayes;
using namespace rkbayes::assembly;
using test_helpers::random_vector;

namespace {

Vector vec2(double a, double b) { return (Vector(2) << a, b).finished(); }

std::vector<Vector> zeros_like(const std::vector<Vector>& us) {
    return std::vector<Vector>(us.size(), Vector::Zero(us.front().size()));
}

// Bilinear-form oracle for the Toeplitz case, straight from the definition
// <R_phi_i[u], R_phi_j[u]>: sum over targets y of u(y - r_i) u(y - r_j).
Matrix bilinear_oracle(const std::vector<Vector>& us) {
    const Index n = us.front().size();
    const Index l = 2 * n - 1;
    Matrix g = Matrix::Zero(l, l);
    for (const auto& u : us) {
        for (Index i = 0; i < l; ++i) {
            for (Index j = 0; j < l; ++j) {
                const Index ri = i - (n - 1), rj = j - (n - 1);
                for (Index y = 0; y < n; ++y) {
                    const Index a = y - ri, b = y - rj;
                    if (a >= 0 && a < n && b >= 0 && b < n) g(i, j) += u(a) * u(b);
                }
            }
        }
    }
    return g / static_cast<double>(us.size());
}

}  // namespace

TEST_CASE("assemble_toeplitz reproduces the printed benchmark matrices") {
    const auto s1 = assemble_toeplitz({vec2(1, 0)}, zeros_like({vec2(1, 0)}));
    Matrix a1(3, 3);
    a1 << 0, 0, 0, 0, 1, 0, 0, 0, 1;
    CHECK((s1.A_bar.mat() - a1).norm() == 0.0);

    const std::vector<Vector> us2 = {vec2(1, 0), vec2(0, 1)};
    const auto s2 = assemble_toeplitz(us2, zeros_like(us2));
    Matrix a2(3, 3);
    a2 << 0.5, 0, 0, 0, 1, 0, 0, 0, 0.5;
    CHECK((s2.A_bar.mat() - a2).norm() == 0.0);

    const auto s3 = assemble_toeplitz({vec2(1, 1)}, zeros_like({vec2(1, 1)}));
    Matrix a3(3, 3);
    a3 << 1, 1, 0, 1, 2, 1, 0, 1, 1;
    CHECK((s3.A_bar.mat() - a3).norm() == 0.0);
    CHECK((s3.B.mat().diagonal() - (Vector(3) << 0.25, 0.5, 0.25).finished()).norm() ==
          0.0);
}

TEST_CASE("toeplitz b_bar is linear in f and leaves A unchanged") {
    const std::vector<Vector> us = {vec2(1, 2), vec2(-1, 0.5)};
    const std::vector<Vector> fs = {vec2(0.3, -1), vec2(2, 0.1)};
    const auto sys = assemble_toeplitz(us, fs);
    std::vector<Vector> scaled = fs;
    for (auto& f : scaled) f *= 3.0;
    const auto sys3 = assemble_toeplitz(us, scaled);
    CHECK((sys3.b_bar - 3.0 * sys.b_bar).norm() < 1e-14);
    CHECK((sys3.A_bar.mat() - sys.A_bar.mat()).norm() == 0.0);
}

TEST_CASE("assembled A_bar matches the bilinear-form oracle") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        std::vector<Vector> us;
        for (int k = 0; k < 3; ++k) us.push_back(random_vector(4, seed, k + 1));
        const auto sys = assemble_toeplitz(us, zeros_like(us));
        const Matrix oracle = bilinear_oracle(us);
        CHECK((sys.A_bar.mat() - oracle).norm() < 1e-8 * oracle.norm());
    }
}

TEST_CASE("b_bar lies in Range(A_bar) for toeplitz and discrete assembly") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Index n = 2 + static_cast<Index>(seed % 4);
        const int n_pairs = 1 + static_cast<int>(seed % 3);
        std::vector<Vector> us, fs;
        for (int k = 0; k < n_pairs; ++k) {
            us.push_back(random_vector(n, seed + 100, 2 * k));
            fs.push_back(random_vector(n, seed + 100, 2 * k + 1));
        }
        const auto sys = assemble_toeplitz(us, fs);
        CHECK(linalg::range_residual(sys.A_bar, sys.b_bar, 1e-10) <= 1e-10);
    }
}

TEST_CASE("assemble_discrete zero outputs give zero b_bar") {
    auto setup = synth::ConvolutionSetup::paper();
    setup.basis_size = 8;
    const auto fwd = synth::ConvolutionForward::build(setup);
    model::DatasetPair data;
    data.x = setup.x_grid();
    data.y = setup.y_grid();
    data.dx = setup.dx();
    data.dy = setup.dy();
    data.u = fwd.u_on_x;
    for (int k = 0; k < 3; ++k) data.f.push_back(Vector::Zero(setup.L));

    const auto sys = assemble_discrete(data, setup.basis());
    CHECK(sys.b_bar.norm() == 0.0);
    CHECK(sys.meta.mode == "discrete");
    Eigen::SelfAdjointEigenSolver<Matrix> es(sys.A_bar.mat(), Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() >= -1e-10 * es.eigenvalues().maxCoeff());
}

TEST_CASE("assemble_discrete scalar case matches the direct sum") {
    model::DatasetPair data;
    data.x = Vector::LinSpaced(10, 0.0, 0.9);
    data.y = Vector::LinSpaced(5, 0.0, 0.8);
    data.dx = 0.1;
    data.dy = 0.2;
    data.u = {random_vector(10, 5)};
    data.f = {random_vector(5, 6)};
    const auto basis = model::KernelBasis::bspline(-1.0, 1.0, 5, 3);

    const auto sys = assemble_discrete(data, basis);
    const Matrix r = forward_matrix_discrete(basis, data.u[0], data.x, data.dx, data.y);
    double a00 = 0.0;
    for (Index l = 0; l < 5; ++l) a00 += r(l, 0) * r(l, 0) * data.dy;
    CHECK(sys.A_bar(0, 0) == doctest::Approx(a00).epsilon(1e-12));
    CHECK(linalg::range_residual(sys.A_bar, sys.b_bar, 1e-10) <= 1e-10);
}

TEST_CASE("benchmark regression matrix has a wide eigenvalue decay") {
    const auto setup = synth::ConvolutionSetup::paper();
    const auto fwd = synth::ConvolutionForward::build(setup);
    model::DatasetPair data;
    data.x = setup.x_grid();
    data.y = setup.y_grid();
    data.dx = setup.dx();
    data.dy = setup.dy();
    data.u = fwd.u_on_x;
    for (int k = 0; k < 3; ++k) data.f.push_back(Vector::Zero(setup.L));

    const auto sys = assemble_discrete(data, setup.basis());
    Eigen::SelfAdjointEigenSolver<Matrix> es(sys.A_bar.mat(), Eigen::EigenvaluesOnly);
    const double lmax = es.eigenvalues().maxCoeff();
    const double lmin = std::max(es.eigenvalues().minCoeff(), 0.0);
    CHECK(lmax / std::max(lmin, 1e-300) > 1e6);
}

TEST_CASE("forward_quad matches the Gaussian CDF oracle for a constant kernel") {
    const model::GaussianInput u{-0.4, 1.0 / 15.0};
    const auto one = [](double) { return 1.0; };
    const double expected = u.cdf(1.0) - u.cdf(0.0);
    for (double y : {0.0, 0.3, 0.9}) {
        CHECK(forward_quad(one, u, y, 1e-12) == doctest::Approx(expected).epsilon(1e-10));
    }
}

TEST_CASE("continuous assembly approaches the discrete one at the Riemann rate") {
    auto coarse = synth::ConvolutionSetup::paper();
    coarse.basis_size = 8;
    auto fine = coarse;
    fine.J = coarse.J * 8;
    fine.L = coarse.L * 8;

    const auto make_data = [](const synth::ConvolutionSetup& s) {
        model::DatasetPair data;
        data.x = s.x_grid();
        data.y = s.y_grid();
        data.dx = s.dx();
        data.dy = s.dy();
        data.analytic = s.inputs;
        for (const auto& g : s.inputs) {
            Vector u(s.J);
            for (Index j = 0; j < s.J; ++j) u(j) = g.density(data.x(j));
            data.u.push_back(std::move(u));
            data.f.push_back(Vector::Zero(s.L));
        }
        return data;
    };

    const auto rho = model::convolution_measure(make_data(coarse), 201);
    const auto basis = coarse.basis();
    const Matrix ac = assemble_continuous(make_data(coarse), basis, rho, 1e-11).A_bar.mat();
    const double gap_coarse =
        (assemble_discrete(make_data(coarse), basis, rho).A_bar.mat() - ac).norm();
    const double gap_fine =
        (assemble_discrete(make_data(fine), basis, rho).A_bar.mat() - ac).norm();
    // first-order rate: refining the grids by 8 shrinks the gap accordingly
    CHECK(gap_fine < gap_coarse / 3.0);
    CHECK(gap_coarse < 1.0);
}

TEST_CASE("continuous assembly breaks exact range membership") {
    auto setup = synth::ConvolutionSetup::paper();
    setup.basis_size = 8;
    const auto fwd = synth::ConvolutionForward::build(setup);
    model::DatasetPair data;
    data.x = setup.x_grid();
    data.y = setup.y_grid();
    data.dx = setup.dx();
    data.dy = setup.dy();
    data.analytic = setup.inputs;
    data.u = fwd.u_on_x;
    for (int k = 0; k < 3; ++k) data.f.push_back(random_vector(setup.L, 77, k));

    const auto sys = assemble_continuous(data, setup.basis(), 1e-10);
    CHECK(sys.meta.mode == "continuous");
    CHECK(linalg::range_residual(sys.A_bar, sys.b_bar, 1e-10) > 1e-6);
}

TEST_CASE("assemble_continuous requires analytic inputs") {
    model::DatasetPair data;
    data.x = Vector::LinSpaced(10, 0.0, 0.9);
    data.y = data.x;
    data.dx = 0.1;
    data.dy = 0.1;
    data.u = {Vector::Ones(10)};
    data.f = {Vector::Zero(10)};
    CHECK_THROWS_AS(assemble_continuous(data, model::KernelBasis::bspline(-1, 1, 5, 3)),
                    QuadratureFailure);
}

TEST_CASE("prune composes kept indices") {
    const auto sys = assemble_toeplitz({vec2(1, 0)}, zeros_like({vec2(1, 0)}));
    const auto pruned = prune(sys);
    CHECK(pruned.meta.kept == std::vector<Index>{1, 2});
    const auto again = prune(pruned);
    CHECK(again.meta.kept == std::vector<Index>{1, 2});
}
