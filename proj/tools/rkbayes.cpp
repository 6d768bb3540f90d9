// Command-line frontend: assembly diagnostics, posterior computation,
// L-curve selection and the experiment suites.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "rkbayes/experiments.hpp"
#include "rkbayes/io.hpp"
#include "rkbayes/linalg.hpp"
#include "rkbayes/spectral.hpp"

namespace {

using nlohmann::json;
using namespace rkbayes;

constexpr const char* kVersion = "0.1.0";

struct RunConfig {
    std::string subcommand;
    std::string scenario = "discretization";
    std::string mode = "discrete";
    std::string placement = "out";
    std::vector<double> sigmas = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5};
    int reps = 200;
    std::uint64_t seed = 0;
    std::string outdir = "out";
    int threads = 0;
    double tol = 1e-12;
    int basis_size = 20;
    int table = 2;
    int samples = 1000;
    std::string input;
    bool dump_data = false;
};

synth::ScenarioKind scenario_from_name(const std::string& name) {
    if (name == "discretization") return synth::ScenarioKind::Discretization;
    if (name == "partial") return synth::ScenarioKind::PartialObservation;
    if (name == "model-error") return synth::ScenarioKind::ModelError;
    if (name == "wrong-noise") return synth::ScenarioKind::WrongNoise;
    throw ConfigError("unknown scenario: " + name);
}

synth::Placement placement_from_name(const std::string& name) {
    if (name == "in") return synth::Placement::InFsoi;
    if (name == "out") return synth::Placement::OutOfFsoi;
    throw ConfigError("unknown placement: " + name);
}

void apply_config_file(RunConfig& cfg, const std::string& path) {
    const json j = io::load_json(path);
    for (const auto& [key, value] : j.items()) {
        if (key == "subcommand") {
            if (!cfg.subcommand.empty() && value.get<std::string>() != cfg.subcommand)
                throw ConfigError("config file is for subcommand '" +
                                  value.get<std::string>() + "'");
        } else if (key == "scenario") {
            cfg.scenario = value.get<std::string>();
        } else if (key == "mode") {
            cfg.mode = value.get<std::string>();
        } else if (key == "placement") {
            cfg.placement = value.get<std::string>();
        } else if (key == "sigma") {
            cfg.sigmas = value.get<std::vector<double>>();
        } else if (key == "reps") {
            cfg.reps = value.get<int>();
        } else if (key == "seed") {
            cfg.seed = value.get<std::uint64_t>();
        } else if (key == "outdir") {
            cfg.outdir = value.get<std::string>();
        } else if (key == "threads") {
            cfg.threads = value.get<int>();
        } else if (key == "tol") {
            cfg.tol = value.get<double>();
        } else if (key == "basis_size") {
            cfg.basis_size = value.get<int>();
        } else if (key == "table") {
            cfg.table = value.get<int>();
        } else if (key == "samples") {
            cfg.samples = value.get<int>();
        } else if (key == "input") {
            cfg.input = value.get<std::string>();
        } else if (key == "dump_data") {
            cfg.dump_data = value.get<bool>();
        } else if (key == "version") {
            // informational
        } else {
            throw ConfigError("unknown config key: " + key);
        }
    }
}

void write_manifest(const RunConfig& cfg) {
    std::filesystem::create_directories(cfg.outdir);
    json j;
    j["subcommand"] = cfg.subcommand;
    j["scenario"] = cfg.scenario;
    j["mode"] = cfg.mode;
    j["placement"] = cfg.placement;
    j["sigma"] = cfg.sigmas;
    j["reps"] = cfg.reps;
    j["seed"] = cfg.seed;
    j["outdir"] = cfg.outdir;
    j["threads"] = cfg.threads;
    j["tol"] = cfg.tol;
    j["basis_size"] = cfg.basis_size;
    j["table"] = cfg.table;
    j["samples"] = cfg.samples;
    j["input"] = cfg.input;
    j["dump_data"] = cfg.dump_data;
    j["version"] = kVersion;
    io::save_json(cfg.outdir + "/run_manifest.json", j);
}

int cmd_analyze(const RunConfig& cfg) {
    if (cfg.input.empty()) throw ConfigError("analyze: --input is required");
    const auto sys = io::system_from_json(io::load_json(cfg.input));
    const auto pruned = assembly::prune(sys, cfg.tol);
    const auto fsoi = spectral::decompose(pruned.A_bar, pruned.B, cfg.tol);

    json report;
    report["eigvals"] = io::json_of(fsoi.eigvals());
    report["K"] = fsoi.K;
    report["range_residual"] = linalg::range_residual(sys.A_bar, sys.b_bar, cfg.tol);
    report["trace"] = spectral::trace_lg(fsoi);
    std::cout << report.dump(2) << '\n';
    return 0;
}

int cmd_toeplitz(const RunConfig& cfg) {
    write_manifest(cfg);
    if (cfg.table == 2) {
        const auto rows = experiments::run_table2();
        for (const auto& row : rows) {
            std::cout << row.dataset << "  rho = [" << row.rho.transpose()
                      << "]  fsoi_dim = " << row.fsoi_dim << "  eigvals = ["
                      << row.eigvals.transpose() << "]\n";
        }
        return 0;
    }
    if (cfg.table == 3) {
        const auto result =
            experiments::run_table3(cfg.reps, cfg.sigmas.front(), cfg.seed);
        experiments::write_table3_json(cfg.outdir + "/table3.json", result);
        for (const auto& row : result.rows) {
            std::cout << "phi_true = [" << row.phi_true.transpose() << "]  bias(m1) = "
                      << row.bias_fixed_mean << " +- " << row.bias_fixed_std
                      << "  bias(m1D) = " << row.bias_da_mean << " +- "
                      << row.bias_da_std << "  Tr(Q1) = " << row.trace_fixed_mean
                      << "  Tr(Q1D) = " << row.trace_da_mean << '\n';
        }
        std::cout << "wrote " << cfg.outdir << "/table3.json\n";
        return 0;
    }
    throw ConfigError("toeplitz: --table must be 2 or 3");
}

int cmd_sweep(const RunConfig& cfg) {
    write_manifest(cfg);
    experiments::ConvolutionLab lab(
        [&] {
            auto setup = synth::ConvolutionSetup::paper();
            setup.basis_size = cfg.basis_size;
            return setup;
        }(),
        cfg.tol);
    experiments::SweepConfig sweep;
    sweep.scenario = scenario_from_name(cfg.scenario);
    sweep.mode = cfg.mode;
    sweep.placement = placement_from_name(cfg.placement);
    sweep.sigmas = cfg.sigmas;
    sweep.n_reps = cfg.reps;
    sweep.seed = cfg.seed;
    sweep.threads = cfg.threads;
    const auto result = experiments::run_noise_sweep(lab, sweep);
    const std::string path = cfg.outdir + "/sweep_" + cfg.scenario + "_" + cfg.mode +
                             "_" + cfg.placement + ".csv";
    experiments::write_sweep_csv(path, result);
    std::cout << "wrote " << path << '\n';
    return 0;
}

int cmd_bands(const RunConfig& cfg) {
    write_manifest(cfg);
    experiments::ConvolutionLab lab(
        [&] {
            auto setup = synth::ConvolutionSetup::paper();
            setup.basis_size = cfg.basis_size;
            return setup;
        }(),
        cfg.tol);
    const auto result = experiments::run_posterior_bands(
        lab, scenario_from_name(cfg.scenario), placement_from_name(cfg.placement),
        cfg.sigmas.front(), cfg.samples, cfg.seed);
    const std::string path = cfg.outdir + "/bands_" + cfg.scenario + ".csv";
    experiments::write_bands_csv(path, result);
    std::cout << "wrote " << path << '\n';
    return 0;
}

int cmd_divergence(const RunConfig& cfg) {
    write_manifest(cfg);
    const auto result = experiments::run_divergence_rates({0.0, 1.0, 2.0}, 1.0, cfg.seed);
    json j;
    j["fixed_slope"] = result.fixed_slope;
    j["da_slope"] = result.da_slope;
    j["beta_rates"] = json::array();
    for (const auto& rate : result.beta_rates) {
        j["beta_rates"].push_back({{"beta", rate.beta},
                                   {"slope", rate.slope},
                                   {"limit_gap", rate.limit_gap},
                                   {"norm_ratio", rate.norm_ratio}});
    }
    io::save_json(cfg.outdir + "/divergence.json", j);
    std::cout << j.dump(2) << '\n';
    return 0;
}

int cmd_lcurve(const RunConfig& cfg) {
    assembly::RegressionSystem pruned;
    if (!cfg.input.empty()) {
        pruned = assembly::prune(io::system_from_json(io::load_json(cfg.input)), cfg.tol);
    } else {
        experiments::ConvolutionLab lab(
            [&] {
                auto setup = synth::ConvolutionSetup::paper();
                setup.basis_size = cfg.basis_size;
                return setup;
            }(),
            cfg.tol);
        const double sigma = cfg.sigmas.front();
        const Vector phi = synth::sample_true_kernel(
            {placement_from_name(cfg.placement), 3}, lab.fsoi(), lab.l_full(), lab.kept(),
            cfg.seed);
        const auto data = synth::gen_convolution_dataset(
            lab.setup(), lab.forward(), {scenario_from_name(cfg.scenario)}, phi, sigma,
            cfg.seed + 1);
        if (cfg.dump_data)
            io::save_json(cfg.outdir + "/dataset.json", io::json_of(data));
        pruned = assembly::prune(lab.system(cfg.mode, data, sigma), cfg.tol);
    }
    const auto curve = lcurve::curve_points(pruned, lcurve::default_grid(pruned));
    std::cout << "lambda,x,y,kappa\n";
    for (Index i = 0; i < curve.lambdas.size(); ++i) {
        char buf[200];
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", curve.lambdas(i),
                      curve.x(i), curve.y(i), curve.kappa(i));
        std::cout << buf;
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "# lambda_star=%.17g\n", curve.lambda_star);
    std::cout << buf;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    RunConfig cfg;

    CLI::App app{"Kernel learning in linear operators with data-adaptive RKHS priors"};
    app.require_subcommand(1);

    std::string config_path;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file (flags override)");
        sub->add_option("--seed", cfg.seed, "RNG seed")->envname("RKHS_BAYES_SEED");
        sub->add_option("--outdir", cfg.outdir, "output directory");
        sub->add_option("--threads", cfg.threads, "worker cap (0 = all cores)");
        sub->add_option("--tol", cfg.tol, "rank / pruning tolerance");
        sub->add_option("--basis-size", cfg.basis_size, "number of B-spline basis functions");
    };

    auto* analyze = app.add_subcommand("analyze", "spectral report of a regression system");
    analyze->add_option("--input", cfg.input, "RegressionSystem JSON file");
    add_common(analyze);

    auto* toeplitz = app.add_subcommand("toeplitz", "Toeplitz benchmark tables");
    toeplitz->add_option("--table", cfg.table, "which table to reproduce (2 or 3)");
    toeplitz->add_option("--reps", cfg.reps, "number of replicates");
    toeplitz->add_option("--sigma", cfg.sigmas, "noise level(s)")->delimiter(',');
    add_common(toeplitz);

    auto* sweep = app.add_subcommand("sweep", "noise sweep with IQR statistics");
    sweep->add_option("--scenario", cfg.scenario,
                      "discretization|partial|model-error|wrong-noise");
    sweep->add_option("--mode", cfg.mode, "discrete|continuous");
    sweep->add_option("--placement", cfg.placement, "in|out");
    sweep->add_option("--sigma", cfg.sigmas, "noise levels")->delimiter(',');
    sweep->add_option("--reps", cfg.reps, "replicates per noise level");
    add_common(sweep);

    auto* bands = app.add_subcommand("bands", "posterior percentile bands");
    bands->add_option("--scenario", cfg.scenario,
                      "discretization|partial|model-error|wrong-noise");
    bands->add_option("--placement", cfg.placement, "in|out");
    bands->add_option("--sigma", cfg.sigmas, "noise level")->delimiter(',');
    bands->add_option("--samples", cfg.samples, "posterior samples");
    add_common(bands);

    auto* divergence = app.add_subcommand("divergence", "small-noise rate measurements");
    add_common(divergence);

    auto* lcurve_cmd = app.add_subcommand("lcurve", "emit the L-curve as CSV");
    lcurve_cmd->add_option("--input", cfg.input, "RegressionSystem JSON file");
    lcurve_cmd->add_option("--scenario", cfg.scenario, "synthetic scenario when no input");
    lcurve_cmd->add_option("--mode", cfg.mode, "discrete|continuous");
    lcurve_cmd->add_option("--placement", cfg.placement, "in|out");
    lcurve_cmd->add_option("--sigma", cfg.sigmas, "noise level")->delimiter(',');
    lcurve_cmd->add_flag("--dump-data", cfg.dump_data, "persist the generated dataset");
    add_common(lcurve_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help() << '\n';
        return 2;
    }

    try {
        CLI::App* sub = app.get_subcommands().front();
        cfg.subcommand = sub->get_name();
        if (!config_path.empty()) {
            // Config provides defaults; reparse so flags win.
            RunConfig from_file;
            from_file.subcommand = cfg.subcommand;
            apply_config_file(from_file, config_path);
            from_file.subcommand.clear();
            cfg = from_file;
            cfg.subcommand = sub->get_name();
            try {
                app.clear();
                app.parse(argc, argv);
            } catch (const CLI::ParseError& e) {
                std::cerr << e.what() << '\n';
                return 2;
            }
        }
        if (cfg.sigmas.empty()) throw ConfigError("empty sigma list");
        if (cfg.reps < 1) throw ConfigError("--reps must be positive");

        if (cfg.subcommand == "analyze") return cmd_analyze(cfg);
        if (cfg.subcommand == "toeplitz") return cmd_toeplitz(cfg);
        if (cfg.subcommand == "sweep") return cmd_sweep(cfg);
        if (cfg.subcommand == "bands") return cmd_bands(cfg);
        if (cfg.subcommand == "divergence") return cmd_divergence(cfg);
        if (cfg.subcommand == "lcurve") return cmd_lcurve(cfg);
        throw ConfigError("unknown subcommand");
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const DegenerateSystem& e) {
        std::cerr << "degenerate system: " << e.what() << '\n';
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
