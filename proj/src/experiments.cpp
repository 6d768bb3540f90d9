#include "rkbayes/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <thread>

#include <nlohmann/json.hpp>

#include "rkbayes/linalg.hpp"
#include "rkbayes/rng.hpp"
#include "rkbayes/spectral.hpp"

namespace rkbayes::experiments {

namespace {

using nlohmann::json;

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
    int t = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    t = std::max(1, std::min(t, n));
    if (t == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(t);
    for (int w = 0; w < t; ++w)
        pool.emplace_back([&, w] {
            for (int i = w; i < n; i += t) fn(i);
        });
    for (auto& th : pool) th.join();
}

double mean_of(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc / static_cast<double>(v.size());
}

double stddev_of(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double acc = 0.0;
    for (double x : v) acc += (x - m) * (x - m);
    return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

double fit_slope(const std::vector<double>& logx, const std::vector<double>& logy) {
    const double n = static_cast<double>(logx.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < logx.size(); ++i) {
        sx += logx[i];
        sy += logy[i];
        sxx += logx[i] * logx[i];
        sxy += logx[i] * logy[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return rng::mix64(rng::mix64(seed ^ rng::mix64(a)) ^ b);
}

std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open output file: " + path);
    return out;
}

}  // namespace

std::string scenario_name(synth::ScenarioKind kind) {
    switch (kind) {
        case synth::ScenarioKind::Discretization: return "discretization";
        case synth::ScenarioKind::PartialObservation: return "partial";
        case synth::ScenarioKind::ModelError: return "model-error";
        case synth::ScenarioKind::WrongNoise: return "wrong-noise";
    }
    throw ConfigError("unknown scenario");
}

std::string placement_name(synth::Placement placement) {
    return placement == synth::Placement::InFsoi ? "in" : "out";
}

double percentile(std::vector<double> values, double p) {
    if (values.empty()) throw DimensionMismatch("percentile: empty sample");
    std::sort(values.begin(), values.end());
    const double h = p * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(h);
    if (lo + 1 >= values.size()) return values.back();
    return values[lo] + (h - static_cast<double>(lo)) * (values[lo + 1] - values[lo]);
}

ConvolutionLab::ConvolutionLab(synth::ConvolutionSetup setup, double tol, double quad_tol)
    : setup_(std::move(setup)),
      fwd_(synth::ConvolutionForward::build(setup_, quad_tol)),
      basis_(setup_.basis()),
      tol_(tol) {
    model::DatasetPair skeleton;
    skeleton.x = setup_.x_grid();
    skeleton.y = setup_.y_grid();
    skeleton.dx = setup_.dx();
    skeleton.dy = setup_.dy();
    skeleton.analytic = setup_.inputs;
    skeleton.u = fwd_.u_on_x;
    for (Index k = 0; k < static_cast<Index>(setup_.inputs.size()); ++k)
        skeleton.f.push_back(Vector::Zero(setup_.L));

    rho_ = model::convolution_measure(skeleton);
    phi_eval_.resize(rho_.points.size(), basis_.size());
    for (Index g = 0; g < rho_.points.size(); ++g)
        phi_eval_.row(g) = basis_.eval_all(rho_.points(g)).transpose();
    b_full_ = model::basis_matrix(basis_, rho_);

    for (const auto& uk : fwd_.u_on_x)
        rhat_.push_back(assembly::forward_matrix_discrete(basis_, uk, skeleton.x,
                                                          skeleton.dx, skeleton.y));

    const auto sys_d = assembly::assemble_discrete(skeleton, basis_, rho_);
    a_discrete_ = sys_d.A_bar.mat();
    const auto sys_c = assembly::assemble_continuous(skeleton, basis_, rho_, quad_tol);
    a_continuous_ = sys_c.A_bar.mat();

    const auto pruned = assembly::prune(sys_d, tol_);
    kept_ = pruned.meta.kept;
    fsoi_ = spectral::decompose(pruned.A_bar, pruned.B, tol_);
}

assembly::RegressionSystem ConvolutionLab::system(const std::string& mode,
                                                  const model::DatasetPair& data,
                                                  double sigma_eta) const {
    if (mode != "discrete" && mode != "continuous")
        throw ConfigError("unknown assembly mode: " + mode);
    const double inv_n = 1.0 / static_cast<double>(data.n_pairs());
    Vector b = Vector::Zero(basis_.size());
    double loss_const = 0.0;
    for (Index k = 0; k < data.n_pairs(); ++k) {
        b.noalias() += data.dy * (rhat_[k].transpose() * data.f[k]);
        loss_const += data.dy * data.f[k].squaredNorm();
    }
    b *= inv_n;
    loss_const *= inv_n;

    assembly::RegressionSystem sys;
    sys.A_bar = SymMatrix(mode == "discrete" ? a_discrete_ : a_continuous_);
    sys.b_bar = std::move(b);
    sys.B = b_full_;
    sys.sigma_eta = sigma_eta;
    sys.meta.mode = mode;
    sys.meta.n_pairs = data.n_pairs();
    sys.meta.grid_in = data.x.size();
    sys.meta.grid_out = data.y.size();
    sys.meta.loss_const = loss_const;
    sys.meta.l_full = basis_.size();
    return sys;
}

double ConvolutionLab::relative_error(const Vector& coeffs, const Vector& truth) const {
    const Vector e = coeffs - truth;
    const double num = e.dot(b_full_.mat() * e);
    const double den = truth.dot(b_full_.mat() * truth);
    if (!(den > 0.0)) return std::sqrt(std::max(num, 0.0));
    return std::sqrt(std::max(num, 0.0) / den);
}

Vector ConvolutionLab::kernel_on_grid(const Vector& coeffs) const {
    return phi_eval_ * coeffs;
}

SweepResult run_noise_sweep(const ConvolutionLab& lab, const SweepConfig& config) {
    if (config.n_reps < 1) throw ConfigError("run_noise_sweep: n_reps >= 1");
    if (config.sigmas.empty()) throw ConfigError("run_noise_sweep: empty sigma list");

    SweepResult result;
    result.scenario = config.scenario;
    result.mode = config.mode;
    result.placement = config.placement;
    result.n_reps = config.n_reps;
    result.seed = config.seed;

    synth::ErrorScenario scenario;
    scenario.kind = config.scenario;
    scenario.sigma_xi = config.scenario == synth::ScenarioKind::ModelError ? 0.01 : 0.0;
    const synth::TrueKernelSpec kernel_spec{config.placement, 3};

    const Index n_sigma = static_cast<Index>(config.sigmas.size());
    std::vector<std::vector<double>> err_fixed(n_sigma), err_da(n_sigma);
    result.lambda_stars.assign(n_sigma, {});
    for (Index s = 0; s < n_sigma; ++s) {
        err_fixed[s].resize(config.n_reps);
        err_da[s].resize(config.n_reps);
        result.lambda_stars[s].resize(config.n_reps);
    }

    const int total = static_cast<int>(n_sigma) * config.n_reps;
    parallel_for(total, config.threads, [&](int idx) {
        const Index s = idx / config.n_reps;
        const int rep = idx % config.n_reps;
        const double sigma = config.sigmas[s];

        const Vector phi_true = synth::sample_true_kernel(
            kernel_spec, lab.fsoi(), lab.l_full(), lab.kept(),
            derive_seed(config.seed, 0xbeef, rep));
        const auto data = synth::gen_convolution_dataset(
            lab.setup(), lab.forward(), scenario, phi_true, sigma,
            derive_seed(config.seed, s + 1, rep));

        const auto sys = lab.system(config.mode, data, sigma);
        const auto sys_p = assembly::prune(sys, 1e-12);

        const Vector m_fixed = bayes::fixed_posterior(sys).mean;
        const double lam = lcurve::select_lambda(sys_p);
        const Vector m_da = model::expand_vector(lcurve::solve_at(sys_p, lam),
                                                 sys_p.meta.kept, lab.l_full());

        err_fixed[s][rep] = lab.relative_error(m_fixed, phi_true);
        err_da[s][rep] = lab.relative_error(m_da, phi_true);
        result.lambda_stars[s][rep] = lam;
    });

    for (Index s = 0; s < n_sigma; ++s) {
        SweepCell cell;
        cell.sigma = config.sigmas[s];
        cell.q25_fixed = percentile(err_fixed[s], 0.25);
        cell.q50_fixed = percentile(err_fixed[s], 0.50);
        cell.q75_fixed = percentile(err_fixed[s], 0.75);
        cell.q25_da = percentile(err_da[s], 0.25);
        cell.q50_da = percentile(err_da[s], 0.50);
        cell.q75_da = percentile(err_da[s], 0.75);
        result.cells.push_back(cell);
    }
    return result;
}

std::vector<Table2Row> run_table2() {
    const Vector u1 = (Vector(2) << 1.0, 0.0).finished();
    const Vector u2 = (Vector(2) << 0.0, 1.0).finished();
    const Vector u3 = (Vector(2) << 1.0, 1.0).finished();
    const std::vector<std::pair<std::string, std::vector<Vector>>> datasets = {
        {"{u1}", {u1}}, {"{u1,u2}", {u1, u2}}, {"{u3}", {u3}}};

    std::vector<Table2Row> rows;
    for (const auto& [name, us] : datasets) {
        std::vector<Vector> fs(us.size(), Vector::Zero(us.front().size()));
        const auto sys = assemble_toeplitz(us, fs);
        const auto pruned = assembly::prune(sys);

        Table2Row row;
        row.dataset = name;
        row.rho = sys.B.mat().diagonal();
        spectral::Fsoi fsoi;
        if (pruned.meta.kept.size() < static_cast<std::size_t>(sys.l())) {
            // Degenerate measure: report the spectrum of the effective
            // (pruned) regression matrix itself.
            fsoi = spectral::decompose(pruned.A_bar, SymMatrix::identity(pruned.l()));
        } else {
            fsoi = spectral::decompose(pruned.A_bar, pruned.B);
        }
        row.fsoi_dim = fsoi.K;
        row.eigvals = fsoi.eigvals();
        row.eigvecs = model::expand_matrix(fsoi.eigvecs(), pruned.meta.kept, sys.l());
        rows.push_back(std::move(row));
    }
    return rows;
}

Table3Result run_table3(int n_reps, double sigma, std::uint64_t seed) {
    if (n_reps < 2) throw ConfigError("run_table3: n_reps >= 2");
    const std::vector<Vector> us = {(Vector(2) << 1.0, 1.0).finished()};
    const std::vector<Vector> cases = {(Vector(3) << 1.0, 1.0, 1.0).finished(),
                                       (Vector(3) << 1.0, 0.0, 1.0).finished()};

    Table3Result result;
    result.n_reps = n_reps;
    result.sigma = sigma;
    result.seed = seed;

    for (std::size_t c = 0; c < cases.size(); ++c) {
        const Vector& phi_true = cases[c];
        std::vector<double> bias_fixed(n_reps), bias_da(n_reps), tr_fixed(n_reps),
            tr_da(n_reps);
        parallel_for(n_reps, 0, [&](int rep) {
            const auto fs = synth::gen_toeplitz_dataset(
                us, phi_true, sigma, derive_seed(seed, c + 1, rep));
            auto sys = assemble_toeplitz(us, fs, sigma);

            const auto post_fixed = bayes::fixed_posterior(sys);
            const double lam = lcurve::select_lambda(sys);
            const auto post_da = bayes::da_posterior(sys, lam / (sigma * sigma));

            const auto rel = [&](const Vector& m) {
                const Vector e = m - phi_true;
                return std::sqrt(e.dot(sys.B.mat() * e) /
                                 phi_true.dot(sys.B.mat() * phi_true));
            };
            bias_fixed[rep] = rel(post_fixed.mean);
            bias_da[rep] = rel(post_da.mean);
            tr_fixed[rep] = spectral::coeff_cov_operator_trace(post_fixed.cov, sys.B);
            tr_da[rep] = spectral::coeff_cov_operator_trace(post_da.cov, sys.B);
        });

        Table3Row row;
        row.phi_true = phi_true;
        row.bias_fixed_mean = mean_of(bias_fixed);
        row.bias_fixed_std = stddev_of(bias_fixed);
        row.bias_da_mean = mean_of(bias_da);
        row.bias_da_std = stddev_of(bias_da);
        row.trace_fixed_mean = mean_of(tr_fixed);
        row.trace_fixed_std = stddev_of(tr_fixed);
        row.trace_da_mean = mean_of(tr_da);
        row.trace_da_std = stddev_of(tr_da);
        result.rows.push_back(std::move(row));
    }
    return result;
}

BandsResult run_posterior_bands(const ConvolutionLab& lab, synth::ScenarioKind scenario,
                                synth::Placement placement, double sigma,
                                Index n_samples, std::uint64_t seed) {
    if (n_samples < 2) throw ConfigError("run_posterior_bands: n_samples >= 2");
    synth::ErrorScenario err;
    err.kind = scenario;
    err.sigma_xi = scenario == synth::ScenarioKind::ModelError ? 0.01 : 0.0;

    const Vector phi_true =
        synth::sample_true_kernel({placement, 3}, lab.fsoi(), lab.l_full(), lab.kept(),
                                  derive_seed(seed, 0xbeef, 0));
    const auto data = synth::gen_convolution_dataset(lab.setup(), lab.forward(), err,
                                                     phi_true, sigma,
                                                     derive_seed(seed, 1, 0));
    const auto sys = lab.system("discrete", data, sigma);
    const auto sys_p = assembly::prune(sys, 1e-12);

    const auto post_fixed = bayes::fixed_posterior(sys);
    const double lam = lcurve::select_lambda(sys_p);
    const auto post_da = bayes::da_posterior(sys_p, lam / (sigma * sigma));

    BandsResult out;
    out.scenario = scenario;
    out.sigma = sigma;
    out.r = lab.rho().points;
    out.phi_true = lab.kernel_on_grid(phi_true);
    out.map_fixed = lab.kernel_on_grid(post_fixed.mean);
    out.map_da = lab.kernel_on_grid(
        model::expand_vector(post_da.mean, sys_p.meta.kept, lab.l_full()));

    const auto band = [&](const GaussianCoeff& g, bool pruned, Vector& q25, Vector& q75,
                          std::uint64_t sample_seed) {
        const Matrix samples = bayes::sample_posterior(g, n_samples, sample_seed);
        const Index n_grid = out.r.size();
        Matrix vals(n_samples, n_grid);
        for (Index i = 0; i < n_samples; ++i) {
            Vector c = samples.row(i).transpose();
            if (pruned) c = model::expand_vector(c, sys_p.meta.kept, lab.l_full());
            vals.row(i) = lab.kernel_on_grid(c).transpose();
        }
        q25.resize(n_grid);
        q75.resize(n_grid);
        for (Index gpt = 0; gpt < n_grid; ++gpt) {
            std::vector<double> col(vals.col(gpt).data(), vals.col(gpt).data() + n_samples);
            q25(gpt) = percentile(col, 0.25);
            q75(gpt) = percentile(col, 0.75);
        }
    };
    band(post_fixed, false, out.q25_fixed, out.q75_fixed, derive_seed(seed, 101, 0));
    band(post_da, true, out.q25_da, out.q75_da, derive_seed(seed, 202, 0));
    return out;
}

DivergenceResult run_divergence_rates(const std::vector<double>& betas, double c0,
                                      std::uint64_t seed) {
    (void)seed;  // the perturbation is deterministic
    const std::vector<Vector> us = {(Vector(2) << 1.0, 1.0).finished()};
    const Vector phi_true = (Vector(3) << 1.0, 1.0, 1.0).finished();
    std::vector<Vector> fs = {assembly::toeplitz_stencil(us[0]) * phi_true};
    auto base = assemble_toeplitz(us, fs);

    // Controlled perturbation: a component outside Range(A) plus a small
    // in-range one, so both rates are visible.
    const Vector v_null = (Vector(3) << 1.0, -1.0, 1.0).finished().normalized();
    const Vector v_range = (Vector(3) << 1.0, 2.0, 1.0).finished().normalized();
    base.b_bar += 1e-3 * v_null + 1e-3 * v_range;

    const auto fsoi = spectral::decompose(base.A_bar, base.B);
    // Small-noise limit of the data-adaptive mean: the identifiable content.
    Vector limit = Vector::Zero(3);
    {
        const Vector bt = fsoi.eigvecs().transpose() * base.b_bar;
        for (Index i = 0; i < fsoi.K; ++i)
            limit += bt(i) / fsoi.eigvals()(i) * fsoi.eigvecs().col(i);
    }

    DivergenceResult result;
    result.sigmas = (Vector(5) << 1e-1, 1e-2, 1e-3, 1e-4, 1e-5).finished();

    const auto bnorm = [&](const Vector& v) {
        return std::sqrt(v.dot(base.B.mat() * v));
    };

    std::vector<double> logs, log_fixed, log_da;
    for (Index i = 0; i < result.sigmas.size(); ++i) {
        const double sigma = result.sigmas(i);
        auto sys = base;
        sys.sigma_eta = sigma;
        const double nf = bnorm(bayes::fixed_posterior(sys).mean);
        const double nd = bnorm(bayes::da_posterior(sys, 1.0).mean - limit);
        if (sigma <= 1e-2 + 1e-15) {
            logs.push_back(std::log(sigma));
            log_fixed.push_back(std::log(nf));
            log_da.push_back(std::log(nd));
        }
    }
    result.fixed_slope = fit_slope(logs, log_fixed);
    result.da_slope = fit_slope(logs, log_da);

    const SymMatrix q0 = SymMatrix::identity(3);
    for (double beta : betas) {
        BetaRate rate;
        rate.beta = beta;
        std::vector<double> lx, ly;
        Vector m_first, m_last;
        for (Index i = 0; i < result.sigmas.size(); ++i) {
            const double sigma = result.sigmas(i);
            auto sys = base;
            sys.sigma_eta = sigma;
            const Vector m = bayes::scaled_posterior_mean(sys, q0, c0, beta);
            if (i == 0) m_first = m;
            if (i + 1 == result.sigmas.size()) m_last = m;
            if (sigma <= 1e-2 + 1e-15) {
                lx.push_back(std::log(sigma));
                ly.push_back(std::log(bnorm(m)));
            }
        }
        rate.slope = fit_slope(lx, ly);
        rate.norm_ratio = bnorm(m_last) / bnorm(m_first);
        if (beta == 1.0) {
            const Matrix reg = base.A_bar.mat() + Matrix::Identity(3, 3) / c0;
            rate.limit_gap = bnorm(m_last - reg.ldlt().solve(base.b_bar));
        }
        result.beta_rates.push_back(rate);
    }
    return result;
}

void write_sweep_csv(const std::string& path, const SweepResult& result) {
    auto out = open_out(path);
    out << "sigma,method,q25,q50,q75\n";
    for (const auto& cell : result.cells) {
        out << format_full(cell.sigma) << ",fixed," << format_full(cell.q25_fixed) << ','
            << format_full(cell.q50_fixed) << ',' << format_full(cell.q75_fixed) << '\n';
        out << format_full(cell.sigma) << ",da," << format_full(cell.q25_da) << ','
            << format_full(cell.q50_da) << ',' << format_full(cell.q75_da) << '\n';
    }
}

void write_table3_json(const std::string& path, const Table3Result& result) {
    json doc;
    doc["n_reps"] = result.n_reps;
    doc["sigma"] = result.sigma;
    doc["seed"] = result.seed;
    doc["rows"] = json::array();
    for (const auto& row : result.rows) {
        json r;
        r["phi_true"] = std::vector<double>(row.phi_true.data(),
                                            row.phi_true.data() + row.phi_true.size());
        r["bias_fixed"] = {{"mean", row.bias_fixed_mean}, {"std", row.bias_fixed_std}};
        r["bias_da"] = {{"mean", row.bias_da_mean}, {"std", row.bias_da_std}};
        r["trace_fixed"] = {{"mean", row.trace_fixed_mean}, {"std", row.trace_fixed_std}};
        r["trace_da"] = {{"mean", row.trace_da_mean}, {"std", row.trace_da_std}};
        doc["rows"].push_back(std::move(r));
    }
    auto out = open_out(path);
    out << doc.dump(2) << '\n';
}

void write_bands_csv(const std::string& path, const BandsResult& result) {
    auto out = open_out(path);
    out << "r,phi_true,map_fixed,map_da,q25_fixed,q75_fixed,q25_da,q75_da\n";
    for (Index i = 0; i < result.r.size(); ++i) {
        out << format_full(result.r(i)) << ',' << format_full(result.phi_true(i)) << ','
            << format_full(result.map_fixed(i)) << ',' << format_full(result.map_da(i))
            << ',' << format_full(result.q25_fixed(i)) << ','
            << format_full(result.q75_fixed(i)) << ',' << format_full(result.q25_da(i))
            << ',' << format_full(result.q75_da(i)) << '\n';
    }
}

void write_lcurve_csv(const std::string& path, const lcurve::LCurve& curve) {
    auto out = open_out(path);
    out << "lambda,x,y,kappa\n";
    for (Index i = 0; i < curve.lambdas.size(); ++i) {
        out << format_full(curve.lambdas(i)) << ',' << format_full(curve.x(i)) << ','
            << format_full(curve.y(i)) << ',' << format_full(curve.kappa(i)) << '\n';
    }
    out << "# lambda_star=" << format_full(curve.lambda_star) << '\n';
}

}  // namespace rkbayes::experiments
