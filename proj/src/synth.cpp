#include "rkbayes/synth.hpp"

#include <cmath>

#include "rkbayes/rng.hpp"

namespace rkbayes::synth {

ConvolutionSetup ConvolutionSetup::paper() {
    ConvolutionSetup s;
    s.inputs = {{-1.0, 1.0 / 15.0}, {-0.4, 1.0 / 15.0}, {0.2, 1.0 / 15.0}};
    return s;
}

model::KernelBasis ConvolutionSetup::basis() const {
    return model::KernelBasis::bspline(-1.0, 1.0, basis_size, degree);
}

Vector ConvolutionSetup::x_grid() const {
    Vector x(J);
    for (Index j = 0; j < J; ++j) x(j) = static_cast<double>(j) / static_cast<double>(J);
    return x;
}

Vector ConvolutionSetup::y_grid() const {
    Vector y(L);
    for (Index l = 0; l < L; ++l) y(l) = static_cast<double>(l) / static_cast<double>(L);
    return y;
}

ConvolutionForward ConvolutionForward::build(const ConvolutionSetup& setup,
                                             double quad_tol) {
    ConvolutionForward fwd;
    const auto basis = setup.basis();
    const Vector x = setup.x_grid(), y = setup.y_grid();
    for (const auto& uk : setup.inputs) {
        fwd.r_quad.push_back(assembly::forward_matrix_quad(basis, uk, y, quad_tol));
        Vector ux(x.size()), uy(y.size());
        for (Index j = 0; j < x.size(); ++j) ux(j) = uk.density(x(j));
        for (Index l = 0; l < y.size(); ++l) uy(l) = uk.density(y(l));
        fwd.u_on_x.push_back(std::move(ux));
        fwd.u_on_y.push_back(std::move(uy));
    }
    return fwd;
}

model::DatasetPair gen_convolution_dataset(const ConvolutionSetup& setup,
                                           const ConvolutionForward& fwd,
                                           const ErrorScenario& scenario,
                                           const Vector& phi_coeffs, double sigma_eta,
                                           std::uint64_t seed) {
    if (phi_coeffs.size() != setup.basis_size)
        throw DimensionMismatch("gen_convolution_dataset: coefficient size mismatch");

    model::DatasetPair data;
    data.x = setup.x_grid();
    data.y = setup.y_grid();
    data.dx = setup.dx();
    data.dy = setup.dy();
    data.analytic = setup.inputs;

    const double noise_scale = sigma_eta / std::sqrt(setup.dy());
    const Index n_missing = setup.L / 4;

    for (std::size_t k = 0; k < setup.inputs.size(); ++k) {
        data.u.push_back(fwd.u_on_x[k]);
        Vector f = fwd.r_quad[k] * phi_coeffs;
        rng::Stream noise(seed, 2 + static_cast<std::uint64_t>(k));
        for (Index l = 0; l < setup.L; ++l) {
            if (scenario.kind == ScenarioKind::WrongNoise)
                f(l) += noise.uniform_sym(std::sqrt(3.0) * noise_scale);
            else
                f(l) += noise_scale * noise.normal();
        }
        if (scenario.kind == ScenarioKind::ModelError) {
            const Vector& uy = fwd.u_on_y[k];
            f += scenario.sigma_xi * uy.cwiseProduct(uy.cwiseAbs());
        }
        if (scenario.kind == ScenarioKind::PartialObservation)
            f.head(n_missing).setZero();
        data.f.push_back(std::move(f));
    }
    return data;
}

model::DatasetPair gen_convolution_dataset(const ErrorScenario& scenario,
                                           const Vector& phi_coeffs, double sigma_eta,
                                           std::uint64_t seed) {
    const auto setup = ConvolutionSetup::paper();
    const auto fwd = ConvolutionForward::build(setup);
    return gen_convolution_dataset(setup, fwd, scenario, phi_coeffs, sigma_eta, seed);
}

std::vector<Vector> gen_toeplitz_dataset(const std::vector<Vector>& us,
                                         const Vector& phi_true, double sigma_eta,
                                         std::uint64_t seed, double sigma_xi) {
    if (us.empty()) throw DimensionMismatch("gen_toeplitz_dataset: no inputs");
    const Index n = us.front().size();
    if (phi_true.size() != 2 * n - 1)
        throw DimensionMismatch("gen_toeplitz_dataset: kernel size must be 2n-1");

    std::vector<Vector> fs;
    fs.reserve(us.size());
    for (std::size_t k = 0; k < us.size(); ++k) {
        Vector f = assembly::toeplitz_stencil(us[k]) * phi_true;
        rng::Stream noise(seed, 2 + static_cast<std::uint64_t>(k));
        for (Index i = 0; i < n; ++i) f(i) += sigma_eta * noise.normal();
        if (sigma_xi != 0.0)
            f += sigma_xi * us[k].cwiseProduct(us[k].cwiseAbs2());
        fs.push_back(std::move(f));
    }
    return fs;
}

Vector sample_true_kernel(const TrueKernelSpec& spec, const spectral::Fsoi& fsoi,
                          Index l_full, const std::vector<Index>& kept,
                          std::uint64_t seed) {
    rng::Stream draw(seed, 1);
    if (spec.placement == Placement::OutOfFsoi) {
        Vector c(l_full);
        for (Index i = 0; i < l_full; ++i) c(i) = draw.normal();
        return c;
    }
    const Index m = spec.n_modes;
    if (fsoi.K < m)
        throw InsufficientRank("sample_true_kernel: FSOI smaller than requested modes");
    Vector z(m);
    for (Index i = 0; i < m; ++i) z(i) = draw.normal();
    const Vector c_pruned = fsoi.eigvecs().leftCols(m) * z;
    if (kept.empty()) {
        if (c_pruned.size() != l_full)
            throw DimensionMismatch("sample_true_kernel: size mismatch");
        return c_pruned;
    }
    return model::expand_vector(c_pruned, kept, l_full);
}

}  // namespace rkbayes::synth
