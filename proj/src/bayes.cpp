#include "rkbayes/bayes.hpp"

#include <cmath>
#include <limits>

#include "rkbayes/linalg.hpp"
#include "rkbayes/rng.hpp"

namespace rkbayes::bayes {

StabilizedSolver::StabilizedSolver(const SymMatrix& A, const SymMatrix& B, double tol) {
    const Matrix s = linalg::psd_sqrt(A, tol).mat();
    Eigen::LLT<Matrix> llt(B.mat());
    if (llt.info() != Eigen::Success)
        throw NotPositiveDefinite("StabilizedSolver: B is not positive definite");
    const Matrix d = llt.solve(s);
    Matrix g = d.transpose() * A.mat() * d;
    g = (g + g.transpose()).eval() * 0.5;
    Eigen::SelfAdjointEigenSolver<Matrix> es(g);
    if (es.info() != Eigen::Success) throw Error("StabilizedSolver: eigensolver failed");
    g_ = es.eigenvalues().cwiseMax(0.0);
    du_ = d * es.eigenvectors();
}

Vector StabilizedSolver::solve(const Vector& b, double t) const {
    const Vector w = du_.transpose() * b;
    return du_ * (w.array() / (g_.array() + t)).matrix();
}

Matrix StabilizedSolver::cov(double t) const {
    return du_ * (1.0 / (g_.array() + t)).matrix().asDiagonal() * du_.transpose();
}

GaussianCoeff fixed_posterior(const assembly::RegressionSystem& sys) {
    const double s2 = sys.sigma_eta * sys.sigma_eta;
    if (!(s2 > 0.0)) throw ConfigError("fixed_posterior: sigma_eta > 0 required");
    const Index l = sys.l();
    const Matrix reg = sys.A_bar.mat() + s2 * Matrix::Identity(l, l);
    Eigen::LDLT<Matrix> ldlt(reg);
    GaussianCoeff out;
    out.mean = ldlt.solve(sys.b_bar);
    out.cov = SymMatrix(Matrix(s2 * ldlt.solve(Matrix::Identity(l, l))));
    return out;
}

GaussianCoeff da_prior(const assembly::RegressionSystem& sys, double lambda_star) {
    if (!(lambda_star > 0.0)) throw ConfigError("da_prior: lambda_star > 0 required");
    Eigen::LLT<Matrix> llt(sys.B.mat());
    if (llt.info() != Eigen::Success)
        throw NotPositiveDefinite("da_prior: B is not positive definite (prune first)");
    const Matrix binv_a = llt.solve(sys.A_bar.mat());
    GaussianCoeff out;
    out.mean = Vector::Zero(sys.l());
    out.cov = SymMatrix(Matrix(llt.solve(binv_a.transpose()) / lambda_star));
    return out;
}

GaussianCoeff da_posterior(const assembly::RegressionSystem& sys, double lambda_star) {
    const double s2 = sys.sigma_eta * sys.sigma_eta;
    if (!(s2 > 0.0)) throw ConfigError("da_posterior: sigma_eta > 0 required");
    if (!(lambda_star > 0.0)) throw ConfigError("da_posterior: lambda_star > 0 required");
    const StabilizedSolver solver(sys.A_bar, sys.B);
    const double t = s2 * lambda_star;
    GaussianCoeff out;
    out.mean = solver.solve(sys.b_bar, t);
    out.cov = SymMatrix(Matrix(s2 * solver.cov(t)));
    return out;
}

Vector scaled_posterior_mean(const assembly::RegressionSystem& sys, const SymMatrix& Q0,
                             double c0, double beta) {
    if (c0 == 0.0) throw ConfigError("scaled_posterior_mean: C0 must be nonzero");
    if (beta < 0.0) throw ConfigError("scaled_posterior_mean: beta >= 0 required");
    const double sigma = sys.sigma_eta;
    if (!(sigma > 0.0)) throw ConfigError("scaled_posterior_mean: sigma_eta > 0 required");
    const double lambda = c0 * std::pow(sigma, 2.0 * beta);
    Eigen::LLT<Matrix> llt(Q0.mat());
    if (llt.info() != Eigen::Success)
        throw NotPositiveDefinite("scaled_posterior_mean: Q0 must be positive definite");
    const Matrix q0inv = llt.solve(Matrix::Identity(sys.l(), sys.l()));
    const Matrix reg = sys.A_bar.mat() + (sigma * sigma / lambda) * q0inv;
    return reg.ldlt().solve(sys.b_bar);
}

Matrix sample_posterior(const GaussianCoeff& g, Index n, std::uint64_t seed) {
    if (n < 1) throw ConfigError("sample_posterior: n >= 1 required");
    const Index l = g.mean.size();
    const Matrix s = linalg::psd_sqrt(g.cov).mat();
    Matrix out(n, l);
    for (Index i = 0; i < n; ++i) {
        Vector z(l);
        for (Index j = 0; j < l; ++j)
            z(j) = rng::normal_at(seed, static_cast<std::uint64_t>(i),
                                  static_cast<std::uint64_t>(j));
        out.row(i) = (g.mean + s * z).transpose();
    }
    return out;
}

void SpectralErrorBudget::validate() const {
    const Index l = lambda.size();
    if (r.size() != l || eps_xi.size() != l)
        throw DimensionMismatch("SpectralErrorBudget: inconsistent lengths");
    if (K < 0 || K > l) throw DimensionMismatch("SpectralErrorBudget: K out of range");
    for (Index i = 0; i + 1 < K; ++i)
        if (lambda(i) < lambda(i + 1))
            throw DimensionMismatch("SpectralErrorBudget: lambda not descending");
    for (Index i = 0; i < K; ++i)
        if (!(lambda(i) > 0.0))
            throw DimensionMismatch("SpectralErrorBudget: lambda_i > 0 for i <= K");
}

double expected_mse_da(const SpectralErrorBudget& b) {
    b.validate();
    const double s2 = b.sigma * b.sigma;
    const double ls = b.lambda_star;
    double acc = 0.0;
    for (Index i = 0; i < b.K; ++i) {
        const double li = b.lambda(i);
        const double denom = li + s2 * ls / li;
        acc += (s2 * (li + s2 * ls * ls / li) + b.eps_xi(i) * b.eps_xi(i)) / (denom * denom);
    }
    return acc;
}

double expected_mse_fixed(const SpectralErrorBudget& b) {
    b.validate();
    const double s2 = b.sigma * b.sigma;
    double acc = 0.0;
    for (Index i = 0; i < b.K; ++i) {
        const double li = b.lambda(i), ri = b.r(i);
        const double e2 = b.eps_xi(i) * b.eps_xi(i);
        if (ri == 0.0) continue;  // infinite precision pins these modes at zero
        const double denom = li + s2 / ri;
        acc += (s2 * li + s2 * s2 / ri + e2) / (denom * denom);
    }
    for (Index i = b.K; i < b.lambda.size(); ++i) {
        const double ri = b.r(i);
        const double e2 = b.eps_xi(i) * b.eps_xi(i);
        acc += ri;
        if (ri > 0.0 && e2 > 0.0) {
            if (s2 == 0.0) return std::numeric_limits<double>::infinity();
            acc += ri * ri * e2 / (s2 * s2);
        }
    }
    return acc;
}

std::pair<double, double> posterior_traces(const SpectralErrorBudget& b) {
    b.validate();
    const double s2 = b.sigma * b.sigma;
    double tr_da = 0.0, tr_fixed = 0.0;
    for (Index i = 0; i < b.K; ++i) {
        const double li = b.lambda(i), ri = b.r(i);
        tr_da += s2 / (li + s2 * b.lambda_star / li);
        if (ri > 0.0) tr_fixed += s2 / (li + s2 / ri);
    }
    for (Index i = b.K; i < b.lambda.size(); ++i) tr_fixed += b.r(i);
    return {tr_da, tr_fixed};
}

}  // namespace rkbayes::bayes
