#include "rkbayes/spectral.hpp"

#include <cmath>

#include "rkbayes/linalg.hpp"

namespace rkbayes::spectral {

Fsoi decompose(const SymMatrix& A, const SymMatrix& B, double tol) {
    Fsoi out;
    out.eig = linalg::gen_eig(A, B, tol);
    out.tol = tol;
    const double lmax = out.eig.eigvals.size() ? out.eig.eigvals(0) : 0.0;
    if (!(lmax > 0.0)) throw DegenerateSystem("decompose: operator is zero");
    for (Index i = 0; i < out.eig.eigvals.size(); ++i)
        if (out.eig.eigvals(i) > tol * lmax) out.K = i + 1;
    return out;
}

SymMatrix rkhs_gram(const SymMatrix& A, const SymMatrix& B, double tol) {
    const Matrix p = linalg::pinv(A, tol).mat();
    return SymMatrix(Matrix(B.mat() * p * B.mat()));
}

double trace_lg(const Fsoi& fsoi) { return fsoi.eig.eigvals.sum(); }

double gbar_trace(const std::vector<Vector>& us, const model::ExplorationMeasure& rho) {
    if (us.empty()) throw DimensionMismatch("gbar_trace: no data");
    const Index n = us.front().size();
    const double inv_n = 1.0 / static_cast<double>(us.size());
    double tr = 0.0;
    for (Index g = 0; g < rho.points.size(); ++g) {
        if (!(rho.weights(g) > 0.0)) continue;  // outside supp(rho)
        const Index r = static_cast<Index>(std::lround(rho.points(g)));
        double grr = 0.0;
        for (const auto& u : us)
            for (Index x = 0; x < n; ++x)
                if (x + r >= 0 && x + r < n) grr += u(x) * u(x);
        tr += inv_n * grr / rho.weights(g);
    }
    return tr;
}

double gbar_trace(const model::DatasetPair& data, const model::ExplorationMeasure& rho) {
    data.validate();
    const double inv_n = 1.0 / static_cast<double>(data.n_pairs());
    double tr = 0.0;
    for (Index g = 0; g < rho.points.size(); ++g) {
        if (!(rho.weights(g) > 0.0)) continue;
        const double r = rho.points(g);
        const double a = std::max(0.0, -r), b = std::min(1.0, 1.0 - r);
        double grr = 0.0;
        for (const auto& uk : data.u)
            for (Index j = 0; j < data.x.size(); ++j)
                if (data.x(j) >= a && data.x(j) <= b)
                    grr += uk(j) * uk(j) * data.dx;
        // density = weight / cell, and the trace integral carries dr = cell
        tr += inv_n * grr * rho.cell * rho.cell / rho.weights(g);
    }
    return tr;
}

double coeff_cov_operator_trace(const SymMatrix& Q, const SymMatrix& B) {
    const Matrix bqb = B.mat() * Q.mat() * B.mat();
    const auto ge = linalg::gen_eig(SymMatrix(bqb), B);
    return ge.eigvals.sum();
}

}  // namespace rkbayes::spectral
