#include "rkbayes/assembly.hpp"

#include <algorithm>
#include <cmath>

#include "rkbayes/quadrature.hpp"

namespace rkbayes::assembly {

Matrix toeplitz_stencil(const Vector& u) {
    const Index n = u.size();
    Matrix lu = Matrix::Zero(n, 2 * n - 1);
    for (Index i = 0; i < n; ++i)
        for (Index col = 0; col < 2 * n - 1; ++col) {
            const Index j = i - (col - (n - 1));  // source index for lag r = col-(n-1)
            if (j >= 0 && j < n) lu(i, col) = u(j);
        }
    return lu;
}

RegressionSystem assemble_toeplitz(const std::vector<Vector>& us,
                                   const std::vector<Vector>& fs, double sigma_eta) {
    if (us.empty() || us.size() != fs.size())
        throw DimensionMismatch("assemble_toeplitz: need matching u/f pairs");
    const Index n = us.front().size();
    for (std::size_t k = 0; k < us.size(); ++k)
        if (us[k].size() != n || fs[k].size() != n)
            throw DimensionMismatch("assemble_toeplitz: inconsistent pair sizes");

    const Index l = 2 * n - 1;
    const double inv_n = 1.0 / static_cast<double>(us.size());
    Matrix a = Matrix::Zero(l, l);
    Vector b = Vector::Zero(l);
    double loss_const = 0.0;
    for (std::size_t k = 0; k < us.size(); ++k) {
        const Matrix lu = toeplitz_stencil(us[k]);
        a.noalias() += lu.transpose() * lu;
        b.noalias() += lu.transpose() * fs[k];
        loss_const += fs[k].squaredNorm();
    }
    a *= inv_n;
    b *= inv_n;
    loss_const *= inv_n;

    const auto rho = model::toeplitz_measure(us);

    RegressionSystem sys;
    sys.A_bar = SymMatrix(std::move(a));
    sys.b_bar = std::move(b);
    sys.B = SymMatrix::diagonal(rho.weights);
    sys.sigma_eta = sigma_eta;
    sys.meta.mode = "toeplitz";
    sys.meta.n_pairs = static_cast<Index>(us.size());
    sys.meta.grid_in = n;
    sys.meta.grid_out = n;
    sys.meta.loss_const = loss_const;
    sys.meta.l_full = l;
    return sys;
}

Matrix forward_matrix_discrete(const model::KernelBasis& basis, const Vector& u,
                               const Vector& x, double dx, const Vector& y) {
    Matrix r = Matrix::Zero(y.size(), basis.size());
    for (Index li = 0; li < y.size(); ++li) {
        for (Index j = 0; j < x.size(); ++j) {
            const Vector phi = basis.eval_all(y(li) - x(j));
            r.row(li) += u(j) * phi.transpose();
        }
        r.row(li) *= dx;
    }
    return r;
}

double forward_quad(const std::function<double(double)>& psi,
                    const model::GaussianInput& u, double y, double tol) {
    const auto f = [&](double x) { return psi(y - x) * u.density(x); };
    return quadrature::integrate(f, 0.0, 1.0, tol);
}

Matrix forward_matrix_quad(const model::KernelBasis& basis,
                           const model::GaussianInput& u, const Vector& y,
                           double tol) {
    Matrix r = Matrix::Zero(y.size(), basis.size());
    for (Index li = 0; li < y.size(); ++li)
        for (Index i = 0; i < basis.size(); ++i) {
            // Restrict to the support of phi_i: x in [y - hi, y - lo].
            const double a = std::max(0.0, y(li) - basis.hi());
            const double b = std::min(1.0, y(li) - basis.lo());
            if (!(b > a)) continue;
            const auto f = [&](double x) {
                return basis.eval(i, y(li) - x) * u.density(x);
            };
            r(li, i) = quadrature::integrate(f, a, b, tol);
        }
    return r;
}

namespace {

RegressionSystem assemble_discrete_impl(const model::DatasetPair& data,
                                        const model::KernelBasis& basis,
                                        const model::ExplorationMeasure& rho,
                                        double sigma_eta) {
    data.validate();
    const Index l = basis.size();
    const double inv_n = 1.0 / static_cast<double>(data.n_pairs());
    Matrix a = Matrix::Zero(l, l);
    Vector b = Vector::Zero(l);
    double loss_const = 0.0;
    for (Index k = 0; k < data.n_pairs(); ++k) {
        const Matrix r = forward_matrix_discrete(basis, data.u[k], data.x, data.dx, data.y);
        a.noalias() += data.dy * (r.transpose() * r);
        b.noalias() += data.dy * (r.transpose() * data.f[k]);
        loss_const += data.dy * data.f[k].squaredNorm();
    }
    a *= inv_n;
    b *= inv_n;
    loss_const *= inv_n;

    RegressionSystem sys;
    sys.A_bar = SymMatrix(std::move(a));
    sys.b_bar = std::move(b);
    sys.B = model::basis_matrix(basis, rho);
    sys.sigma_eta = sigma_eta;
    sys.meta.mode = "discrete";
    sys.meta.n_pairs = data.n_pairs();
    sys.meta.grid_in = data.x.size();
    sys.meta.grid_out = data.y.size();
    sys.meta.loss_const = loss_const;
    sys.meta.l_full = l;
    return sys;
}

}  // namespace

RegressionSystem assemble_discrete(const model::DatasetPair& data,
                                   const model::KernelBasis& basis, double sigma_eta) {
    return assemble_discrete_impl(data, basis, model::convolution_measure(data), sigma_eta);
}

RegressionSystem assemble_discrete(const model::DatasetPair& data,
                                   const model::KernelBasis& basis,
                                   const model::ExplorationMeasure& rho,
                                   double sigma_eta) {
    return assemble_discrete_impl(data, basis, rho, sigma_eta);
}

namespace {

// A_C(i,j) = (1/N) sum_k int_0^1 R_i(y) R_j(y) dy with R_i computed by inner
// quadrature; the outer integral uses composite GL15 panels, doubled until
// the whole-matrix estimate settles.
Matrix quad_gram(const model::KernelBasis& basis,
                 const std::vector<model::GaussianInput>& inputs, double quad_tol) {
    const Index l = basis.size();
    const double inv_n = 1.0 / static_cast<double>(inputs.size());

    const auto estimate = [&](int n_panels) {
        Matrix acc = Matrix::Zero(l, l);
        const double h = 1.0 / static_cast<double>(n_panels);
        for (const auto& uk : inputs) {
            for (int p = 0; p < n_panels; ++p) {
                const double mid = (p + 0.5) * h, half = 0.5 * h;
                for (std::size_t q = 0; q < 15; ++q) {
                    const double yq = mid + half * quadrature::detail::gl15_nodes[q];
                    Vector r(l);
                    for (Index i = 0; i < l; ++i) {
                        const double a = std::max(0.0, yq - basis.hi());
                        const double b = std::min(1.0, yq - basis.lo());
                        r(i) = (b > a)
                                   ? quadrature::integrate(
                                         [&](double x) {
                                             return basis.eval(i, yq - x) * uk.density(x);
                                         },
                                         a, b, quad_tol)
                                   : 0.0;
                    }
                    acc.noalias() +=
                        (quadrature::detail::gl15_weights[q] * half) * (r * r.transpose());
                }
            }
        }
        return Matrix(acc * inv_n);
    };

    Matrix prev = estimate(4);
    for (int n_panels = 8; n_panels <= 256; n_panels *= 2) {
        Matrix cur = estimate(n_panels);
        const double scale = std::max(1.0, cur.norm());
        if ((cur - prev).norm() <= quad_tol * scale) return cur;
        prev = std::move(cur);
    }
    throw QuadratureFailure("assemble_continuous: quadrature did not converge");
}

}  // namespace

RegressionSystem assemble_continuous(const model::DatasetPair& data,
                                     const model::KernelBasis& basis,
                                     const model::ExplorationMeasure& rho,
                                     double quad_tol, double sigma_eta) {
    if (data.analytic.empty())
        throw QuadratureFailure("assemble_continuous: analytic inputs unavailable");
    RegressionSystem sys = assemble_discrete_impl(data, basis, rho, sigma_eta);
    sys.A_bar = SymMatrix(quad_gram(basis, data.analytic, quad_tol));
    sys.meta.mode = "continuous";
    return sys;
}

RegressionSystem assemble_continuous(const model::DatasetPair& data,
                                     const model::KernelBasis& basis, double quad_tol,
                                     double sigma_eta) {
    return assemble_continuous(data, basis, model::convolution_measure(data), quad_tol,
                               sigma_eta);
}

RegressionSystem prune(const RegressionSystem& sys, double tol) {
    auto pruned = model::prune_basis(sys.B, sys.A_bar, sys.b_bar, tol);
    RegressionSystem out;
    out.A_bar = std::move(pruned.A);
    out.b_bar = std::move(pruned.b);
    out.B = std::move(pruned.B);
    out.sigma_eta = sys.sigma_eta;
    out.meta = sys.meta;
    if (sys.meta.kept.empty()) {
        out.meta.kept = std::move(pruned.kept);
    } else {
        // Pruning a pruned system: compose the index maps.
        std::vector<Index> composed;
        composed.reserve(pruned.kept.size());
        for (Index i : pruned.kept) composed.push_back(sys.meta.kept[i]);
        out.meta.kept = std::move(composed);
    }
    return out;
}

}  // namespace rkbayes::assembly
