#include "rkbayes/lcurve.hpp"

#include <cmath>

#include "rkbayes/bayes.hpp"
#include "rkbayes/linalg.hpp"
#include "rkbayes/spectral.hpp"

namespace rkbayes::lcurve {

Vector solve_at(const assembly::RegressionSystem& sys, double lambda) {
    if (lambda < 0.0) throw ConfigError("solve_at: lambda >= 0 required");
    const bayes::StabilizedSolver solver(sys.A_bar, sys.B);
    return solver.solve(sys.b_bar, lambda);
}

Vector default_grid(const assembly::RegressionSystem& sys, Index n_grid) {
    if (n_grid < 10) throw ConfigError("lcurve: need at least 10 grid points");
    const auto ge = linalg::gen_eig(sys.A_bar, sys.B);
    const double lmax = ge.eigvals(0);
    if (!(lmax > 0.0)) throw DegenerateSystem("lcurve: operator is zero");
    double lmin = ge.eigvals(ge.eigvals.size() - 1);
    if (!(lmin > 1e-14 * lmax)) lmin = 1e-14 * lmax;
    if (!(lmin < lmax)) lmin = 1e-14 * lmax;
    const double a = std::log(lmin), b = std::log(lmax);
    Vector grid(n_grid);
    for (Index i = 0; i < n_grid; ++i)
        grid(i) = std::exp(a + (b - a) * static_cast<double>(i) /
                                   static_cast<double>(n_grid - 1));
    return grid;
}

LCurve curve_points(const assembly::RegressionSystem& sys, const Vector& grid) {
    const Index m = grid.size();
    if (m < 3) throw ConfigError("lcurve: grid too small");
    {
        const auto ge = linalg::gen_eig(sys.A_bar, sys.B);
        if (!(ge.eigvals(0) > linalg::default_tol))
            throw DegenerateSystem("lcurve: operator is zero");
    }

    const bayes::StabilizedSolver solver(sys.A_bar, sys.B);
    const Matrix b_rkhs = spectral::rkhs_gram(sys.A_bar, sys.B).mat();

    LCurve out;
    out.lambdas = grid;
    out.x = Vector::Zero(m);
    out.y = Vector::Zero(m);
    out.kappa = Vector::Zero(m);

    Vector loss(m);
    for (Index i = 0; i < m; ++i) {
        const Vector c = solver.solve(sys.b_bar, grid(i));
        loss(i) = c.dot(sys.A_bar.mat() * c) - 2.0 * c.dot(sys.b_bar);
        out.y(i) = std::sqrt(std::max(c.dot(b_rkhs * c), 0.0));
    }
    double shift = sys.meta.loss_const.value_or(0.0);
    const double emin = loss.minCoeff() + shift;
    if (emin <= 0.0) {
        const double span = loss.maxCoeff() - loss.minCoeff();
        shift += -emin + 1e-12 * std::max(1.0, span);
    }
    out.loss_shift = shift;
    out.x = (loss.array() + shift).cwiseMax(0.0).sqrt();

    // Curvature of (log x, log y) against t = log lambda, by central
    // differences on the uniform log grid; endpoints excluded.
    const double h = std::log(grid(1)) - std::log(grid(0));
    const auto safe_log = [](double v) { return std::log(std::max(v, 1e-300)); };
    for (Index i = 1; i + 1 < m; ++i) {
        const double x0 = safe_log(out.x(i - 1)), x1 = safe_log(out.x(i)),
                     x2 = safe_log(out.x(i + 1));
        const double y0 = safe_log(out.y(i - 1)), y1 = safe_log(out.y(i)),
                     y2 = safe_log(out.y(i + 1));
        const double xp = (x2 - x0) / (2.0 * h), xpp = (x2 - 2.0 * x1 + x0) / (h * h);
        const double yp = (y2 - y0) / (2.0 * h), ypp = (y2 - 2.0 * y1 + y0) / (h * h);
        const double denom = std::pow(xp * xp + yp * yp, 1.5);
        const double k = (xp * ypp - yp * xpp) / denom;
        out.kappa(i) = std::isfinite(k) ? k : 0.0;
    }

    double kmax = 0.0;
    Index arg = -1;
    for (Index i = 1; i + 1 < m; ++i) {
        if (out.kappa(i) > kmax) {
            kmax = out.kappa(i);
            arg = i;
        }
    }
    out.lambda_star = (arg >= 0 && kmax >= 1e-12) ? grid(arg) : grid(0);
    return out;
}

double select_lambda(const assembly::RegressionSystem& sys, Index n_grid) {
    return curve_points(sys, default_grid(sys, n_grid)).lambda_star;
}

}  // namespace rkbayes::lcurve
