#include "rkbayes/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace rkbayes::model {

namespace {

// Cox-de Boor value of the basis function starting at knot i.
double bspline_value(const std::vector<double>& t, int p, Index i, double r) {
    const Index nk = static_cast<Index>(t.size());
    // Clamped convention: the last basis function owns the right endpoint.
    if (r == t[nk - 1]) {
        const Index last = nk - p - 2;
        if (i == last) {
            // B_last(hi) = 1 for a clamped knot vector.
            return 1.0;
        }
    }
    std::vector<double> v(p + 1);
    for (int k = 0; k <= p; ++k) {
        const Index j = i + k;
        v[k] = (r >= t[j] && r < t[j + 1]) ? 1.0 : 0.0;
    }
    for (int d = 1; d <= p; ++d) {
        for (int k = 0; k + d <= p; ++k) {
            const Index j = i + k;
            double left = 0.0, right = 0.0;
            if (t[j + d] > t[j]) left = (r - t[j]) / (t[j + d] - t[j]) * v[k];
            if (t[j + d + 1] > t[j + 1])
                right = (t[j + d + 1] - r) / (t[j + d + 1] - t[j + 1]) * v[k + 1];
            v[k] = left + right;
        }
    }
    return v[0];
}

Vector normalize_weights(Vector w) {
    const double total = w.sum();
    if (!(total > 0.0)) throw AllZeroData("exploration measure: all data are zero");
    return w / total;
}

}  // namespace

KernelBasis KernelBasis::dirac(Vector points) {
    KernelBasis b;
    b.kind_ = BasisKind::Dirac;
    b.l_ = points.size();
    if (b.l_ < 1) throw DimensionMismatch("dirac basis: empty point set");
    b.lo_ = points.minCoeff();
    b.hi_ = points.maxCoeff();
    b.points_ = std::move(points);
    return b;
}

KernelBasis KernelBasis::bspline(double lo, double hi, Index size_basis, int degree) {
    if (!(hi > lo)) throw DimensionMismatch("bspline basis: empty support");
    if (degree < 1 || size_basis <= degree)
        throw DimensionMismatch("bspline basis: need size_basis > degree >= 1");
    KernelBasis b;
    b.kind_ = BasisKind::BSpline;
    b.l_ = size_basis;
    b.degree_ = degree;
    b.lo_ = lo;
    b.hi_ = hi;
    const Index spans = size_basis - degree;
    const double h = (hi - lo) / static_cast<double>(spans);
    b.knots_.assign(degree + 1, lo);
    for (Index k = 1; k < spans; ++k) b.knots_.push_back(lo + h * static_cast<double>(k));
    b.knots_.insert(b.knots_.end(), degree + 1, hi);
    return b;
}

double KernelBasis::eval(Index i, double r) const {
    if (i < 0 || i >= l_) throw DimensionMismatch("basis eval: index out of range");
    if (kind_ == BasisKind::Dirac) return r == points_(i) ? 1.0 : 0.0;
    if (r < lo_ || r > hi_) return 0.0;
    return bspline_value(knots_, degree_, i, r);
}

Vector KernelBasis::eval_all(double r) const {
    Vector v = Vector::Zero(l_);
    if (kind_ == BasisKind::Dirac) {
        for (Index i = 0; i < l_; ++i)
            if (r == points_(i)) v(i) = 1.0;
        return v;
    }
    if (r < lo_ || r > hi_) return v;
    for (Index i = 0; i < l_; ++i) v(i) = bspline_value(knots_, degree_, i, r);
    return v;
}

double GaussianInput::density(double x) const {
    const double s2 = var;
    return std::exp(-0.5 * (x - mean) * (x - mean) / s2) /
           std::sqrt(2.0 * std::numbers::pi * s2);
}

double GaussianInput::cdf(double x) const {
    return 0.5 * std::erfc(-(x - mean) / std::sqrt(2.0 * var));
}

void DatasetPair::validate() const {
    if (u.empty() || f.empty()) throw DimensionMismatch("dataset: N >= 1 required");
    if (u.size() != f.size()) throw DimensionMismatch("dataset: #inputs != #outputs");
    if (x.size() < 1 || y.size() < 1) throw DimensionMismatch("dataset: empty grid");
    for (const auto& uk : u)
        if (uk.size() != x.size())
            throw DimensionMismatch("dataset: input not on the shared grid");
    for (const auto& fk : f)
        if (fk.size() != y.size())
            throw DimensionMismatch("dataset: output not on the shared grid");
}

ExplorationMeasure toeplitz_measure(const std::vector<Vector>& us) {
    if (us.empty()) throw DimensionMismatch("toeplitz_measure: no data");
    const Index n = us.front().size();
    for (const auto& u : us)
        if (u.size() != n) throw DimensionMismatch("toeplitz_measure: mixed sizes");

    ExplorationMeasure rho;
    rho.kind = MeasureKind::Atomic;
    rho.points = Vector::LinSpaced(2 * n - 1, static_cast<double>(1 - n),
                                   static_cast<double>(n - 1));
    Vector w = Vector::Zero(2 * n - 1);
    for (const auto& u : us)
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < n; ++j) w(i - j + n - 1) += std::abs(u(j));
    rho.weights = normalize_weights(std::move(w));
    return rho;
}

ExplorationMeasure convolution_measure(const DatasetPair& data, Index n_pts) {
    data.validate();
    if (n_pts < 3) throw DimensionMismatch("convolution_measure: grid too coarse");

    ExplorationMeasure rho;
    rho.kind = MeasureKind::Density;
    rho.points = Vector::LinSpaced(n_pts, -1.0, 1.0);
    rho.cell = 2.0 / static_cast<double>(n_pts - 1);
    Vector w = Vector::Zero(n_pts);
    for (Index g = 0; g < n_pts; ++g) {
        const double r = rho.points(g);
        const double a = std::max(0.0, r), b = std::min(1.0, r + 1.0);
        double acc = 0.0;
        for (const auto& uk : data.u)
            for (Index j = 0; j < data.x.size(); ++j)
                if (data.x(j) >= a && data.x(j) <= b) acc += std::abs(uk(j)) * data.dx;
        w(g) = acc;
    }
    rho.weights = normalize_weights(std::move(w));
    return rho;
}

SymMatrix basis_matrix(const KernelBasis& basis, const ExplorationMeasure& rho) {
    const Index l = basis.size();
    if (basis.kind() == BasisKind::Dirac && basis.points().size() == rho.points.size() &&
        basis.points() == rho.points) {
        return SymMatrix::diagonal(rho.weights);
    }
    Matrix phi(rho.points.size(), l);
    for (Index g = 0; g < rho.points.size(); ++g)
        phi.row(g) = basis.eval_all(rho.points(g)).transpose();
    Matrix b = phi.transpose() * rho.weights.asDiagonal() * phi;
    return SymMatrix(std::move(b));
}

PrunedSystem prune_basis(const SymMatrix& B, const SymMatrix& A, const Vector& b,
                         double tol) {
    const Index l = B.n();
    if (A.n() != l || b.size() != l)
        throw DimensionMismatch("prune_basis: inconsistent system dimensions");
    const double dmax = B.mat().diagonal().maxCoeff();
    std::vector<Index> kept;
    for (Index i = 0; i < l; ++i)
        if (B(i, i) > tol * dmax) kept.push_back(i);
    if (kept.empty()) throw EmptyBasis("prune_basis: every basis function dropped");

    const Index m = static_cast<Index>(kept.size());
    Matrix bm(m, m), am(m, m);
    Vector bv(m);
    for (Index i = 0; i < m; ++i) {
        bv(i) = b(kept[i]);
        for (Index j = 0; j < m; ++j) {
            bm(i, j) = B(kept[i], kept[j]);
            am(i, j) = A(kept[i], kept[j]);
        }
    }
    return PrunedSystem{SymMatrix(std::move(bm)), SymMatrix(std::move(am)),
                        std::move(bv), std::move(kept)};
}

Vector expand_vector(const Vector& v, const std::vector<Index>& kept, Index l_full) {
    Vector out = Vector::Zero(l_full);
    for (Index i = 0; i < static_cast<Index>(kept.size()); ++i) out(kept[i]) = v(i);
    return out;
}

Matrix expand_matrix(const Matrix& m, const std::vector<Index>& kept, Index l_full) {
    Matrix out = Matrix::Zero(l_full, l_full);
    for (Index i = 0; i < static_cast<Index>(kept.size()); ++i)
        for (Index j = 0; j < static_cast<Index>(kept.size()); ++j)
            out(kept[i], kept[j]) = m(i, j);
    return out;
}

double eval_forward_discrete(const std::function<double(double)>& psi, const Vector& u,
                             const Vector& x, double dx, double y) {
    if (u.size() != x.size())
        throw DimensionMismatch("eval_forward_discrete: grid size mismatch");
    double acc = 0.0;
    for (Index j = 0; j < x.size(); ++j) acc += psi(y - x(j)) * u(j);
    return acc * dx;
}

}  // namespace rkbayes::model
