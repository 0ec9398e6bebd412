#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

#include "fsl/dgp.hpp"
#include "fsl/harness.hpp"
#include "fsl/io.hpp"
#include "fsl/strength.hpp"

namespace {

namespace fs = std::filesystem;

// Exit codes: 0 ok, 2 invalid flags, 3 input parse failure, 4 degenerate
// estimate (non-positive projected diagonal), 5 reference check failure.
constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitParse = 3;
constexpr int kExitDegenerate = 4;
constexpr int kExitReference = 5;

struct SimulateArgs {
    std::string model;
    std::string setting = "I";
    long d = 0, d1 = 0, d2 = 0, T = 0;
    std::uint64_t seed = 0;
    double delta = 2.0;
    std::string noise = "correlated";
    std::string format;
    std::string out;
};

struct EstimateArgs {
    std::string model;
    long r = 0, r1 = 0, r2 = 0;
    std::string estimator;
    bool demean = false;
    std::string input;
    std::string out;
};

struct MonteCarloArgs {
    std::string config;
    std::string out;
    std::string reference;
    bool check = false;
    double mean_tol = 0.03;
    double sd_factor = 2.0;
};

fsl::dgp::NoiseSpec make_noise(const std::string& kind, double delta) {
    fsl::dgp::NoiseSpec noise;
    noise.delta = delta;
    if (kind == "iid" || kind == "iid_gaussian") {
        noise.kind = fsl::dgp::NoiseKind::iid_gaussian;
    } else if (kind == "correlated") {
        noise.kind = fsl::dgp::NoiseKind::correlated;
    } else {
        throw CLI::ValidationError("--noise must be 'iid' or 'correlated'");
    }
    return noise;
}

fsl::dgp::Setting parse_setting(const std::string& setting) {
    if (setting == "I") return fsl::dgp::Setting::I;
    if (setting == "II") return fsl::dgp::Setting::II;
    throw CLI::ValidationError("--setting must be 'I' or 'II'");
}

fs::path with_suffix(const fs::path& base, const std::string& suffix) {
    fs::path out = base;
    out.replace_extension();
    out += suffix;
    return out;
}

int run_simulate(const SimulateArgs& args) {
    if (!args.format.empty() && args.format != "long" && args.format != "stacked") {
        std::cerr << "simulate: --format must be 'long' or 'stacked'\n";
        return kExitUsage;
    }
    const fsl::dgp::Setting setting = parse_setting(args.setting);
    const fsl::Vector zeta = fsl::dgp::zeta_for_setting(setting);
    fsl::Vector target = fsl::Vector::Ones(zeta.size()) - 2.0 * zeta;

    const fs::path panel_path = args.out + ".csv";
    const fs::path truth_path = args.out + ".truth.json";

    if (args.model == "vector") {
        if (args.d <= 0 || args.T <= 0) {
            std::cerr << "simulate: vector model needs --d and --T\n";
            return kExitUsage;
        }
        fsl::dgp::VectorDGPSpec spec;
        spec.d = args.d;
        spec.r = zeta.size();
        spec.T = args.T;
        spec.zeta = zeta;
        spec.noise = make_noise(args.noise, args.delta);
        spec.seed = args.seed;
        auto [panel, truth] = fsl::dgp::simulate_vector(spec);
        const auto format = args.format == "stacked" ? fsl::io::PanelFormat::stacked_csv
                                                     : fsl::io::PanelFormat::long_csv;
        fsl::io::write_vector_panel(panel_path, panel, format);
        fsl::io::PanelMeta meta;
        meta.model = "vector";
        meta.T = panel.T();
        meta.d1 = panel.dim();
        fsl::io::write_panel_meta(panel_path, meta);
        fsl::io::write_vector_truth(truth_path, truth, target);
    } else if (args.model == "matrix") {
        if (args.d1 <= 0 || args.d2 <= 0 || args.T <= 0) {
            std::cerr << "simulate: matrix model needs --d1, --d2 and --T\n";
            return kExitUsage;
        }
        fsl::dgp::MatrixDGPSpec spec;
        spec.d1 = args.d1;
        spec.d2 = args.d2;
        spec.r1 = zeta.size();
        spec.r2 = zeta.size();
        spec.T = args.T;
        spec.zeta1 = zeta;
        spec.zeta2 = zeta;
        spec.noise = make_noise(args.noise, args.delta);
        spec.seed = args.seed;
        auto [panel, truth] = fsl::dgp::simulate_matrix(spec);
        const auto format = args.format == "long" ? fsl::io::PanelFormat::long_csv
                                                  : fsl::io::PanelFormat::stacked_csv;
        fsl::io::write_matrix_panel(panel_path, panel, format);
        fsl::io::PanelMeta meta;
        meta.model = "matrix";
        meta.T = panel.T();
        meta.d1 = panel.d1();
        meta.d2 = panel.d2();
        fsl::io::write_panel_meta(panel_path, meta);
        fsl::io::write_matrix_truth(truth_path, truth, target, target);
    } else {
        std::cerr << "simulate: --model must be 'vector' or 'matrix'\n";
        return kExitUsage;
    }
    std::cout << "wrote " << panel_path.string() << ", "
              << fsl::io::meta_path_for(panel_path).string() << ", " << truth_path.string() << "\n";
    return kExitOk;
}

int run_estimate(const EstimateArgs& args) {
    const fs::path out_path = args.out;
    const auto meta = fsl::io::read_panel_meta(args.input);

    if (args.model == "vector") {
        if (args.r <= 0) {
            std::cerr << "estimate: vector model needs --r\n";
            return kExitUsage;
        }
        const fsl::VectorPanel panel = fsl::io::read_vector_panel(args.input);
        fsl::strength::VectorEstimateOptions opts;
        opts.demean = args.demean;
        const auto estimate = fsl::strength::estimate_vector_panel(panel, args.r, opts);
        fsl::io::ReportFileInfo info{"vector", "pca", args.demean, args.input};
        fsl::io::write_vector_report(out_path, estimate, info);
        const std::vector<std::string> labels = meta ? meta->row_labels : std::vector<std::string>{};
        fsl::io::write_loadings_csv(with_suffix(out_path, "_loadings.csv"), estimate.loading.A_hat,
                                    labels);
        std::cout << "alpha_hat:";
        for (fsl::Index j = 0; j < estimate.report.alpha_hat.size(); ++j) {
            std::cout << ' ' << estimate.report.alpha_hat(j);
        }
        std::cout << '\n';
        return kExitOk;
    }
    if (args.model != "matrix") {
        std::cerr << "estimate: --model must be 'vector' or 'matrix'\n";
        return kExitUsage;
    }
    if (args.r1 <= 0 || args.r2 <= 0) {
        std::cerr << "estimate: matrix model needs --r1 and --r2\n";
        return kExitUsage;
    }
    const fsl::MatrixPanel panel = fsl::io::read_matrix_panel(args.input);
    fsl::strength::MatrixEstimateOptions opts;
    opts.demean = args.demean;
    std::string estimator_name = "iterative_projection";
    if (args.estimator == "pca" || args.estimator == "mode_pca") {
        opts.estimator = fsl::strength::MatrixEstimator::mode_pca;
        estimator_name = "pca";
    } else if (!args.estimator.empty() && args.estimator != "iproj" &&
               args.estimator != "iterative_projection") {
        std::cerr << "estimate: --estimator must be 'pca' or 'iterative_projection'\n";
        return kExitUsage;
    }
    const auto estimate = fsl::strength::estimate_matrix_panel(panel, args.r1, args.r2, opts);
    fsl::io::ReportFileInfo info{"matrix", estimator_name, args.demean, args.input};
    fsl::io::write_matrix_report(out_path, estimate, info);
    const std::vector<std::string> row_labels = meta ? meta->row_labels : std::vector<std::string>{};
    const std::vector<std::string> col_labels = meta ? meta->col_labels : std::vector<std::string>{};
    fsl::io::write_loadings_csv(with_suffix(out_path, "_loadings_mode1.csv"),
                                estimate.loading1.A_hat, row_labels);
    fsl::io::write_loadings_csv(with_suffix(out_path, "_loadings_mode2.csv"),
                                estimate.loading2.A_hat, col_labels);
    std::cout << "alpha_hat mode 1:";
    for (fsl::Index j = 0; j < estimate.report1.alpha_hat.size(); ++j) {
        std::cout << ' ' << estimate.report1.alpha_hat(j);
    }
    std::cout << "\nalpha_hat mode 2:";
    for (fsl::Index j = 0; j < estimate.report2.alpha_hat.size(); ++j) {
        std::cout << ' ' << estimate.report2.alpha_hat(j);
    }
    std::cout << '\n';
    return kExitOk;
}

int run_montecarlo(const MonteCarloArgs& args) {
    const fsl::mc::MCConfig config = fsl::io::read_mc_config(args.config);
    const fsl::mc::MCTable table = fsl::mc::run_grid(config);
    const fs::path csv_path = args.out;
    fsl::io::write_table_csv(csv_path, table);
    fsl::io::write_table_json(with_suffix(csv_path, ".json"), table);
    std::cout << "wrote " << table.rows.size() << " rows (" << table.reps << " reps per cell, "
              << fsl::mc::resolve_thread_count() << " workers)\n";

    if (args.reference.empty()) return kExitOk;
    const fsl::mc::MCTable reference = fsl::io::read_table_csv(args.reference);
    const auto outcome = fsl::mc::compare_reference(table, reference, args.mean_tol, args.sd_factor);
    for (const auto& verdict : outcome.verdicts) {
        std::cout << (verdict.pass() ? "    ok" : "  FAIL") << "  d1=" << verdict.row.d1
                  << " d2=" << verdict.row.d2 << " T=" << verdict.row.T
                  << " mode=" << verdict.row.mode << " factor=" << verdict.row.factor
                  << "  mean=" << verdict.row.mean << " ref=" << verdict.ref_mean
                  << "  sd=" << verdict.row.sd << " ref=" << verdict.ref_sd << '\n';
    }
    if (!outcome.all_pass) {
        std::cout << "reference check FAILED\n";
        if (args.check) return kExitReference;
    } else {
        std::cout << "reference check passed\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Factor strength estimation for vector and matrix time series"};
    app.require_subcommand(1);

    SimulateArgs sim;
    CLI::App* simulate = app.add_subcommand("simulate", "Generate a synthetic panel with ground truth");
    simulate->add_option("--model", sim.model, "vector or matrix")->required();
    simulate->add_option("--setting", sim.setting, "strength setting, I or II");
    simulate->add_option("--d", sim.d, "cross-section dimension (vector model)");
    simulate->add_option("--d1", sim.d1, "row dimension (matrix model)");
    simulate->add_option("--d2", sim.d2, "column dimension (matrix model)");
    simulate->add_option("--T", sim.T, "number of time points")->required();
    simulate->add_option("--seed", sim.seed, "RNG seed");
    simulate->add_option("--delta", sim.delta, "signal-to-noise ratio (default 2)");
    simulate->add_option("--noise", sim.noise, "iid or correlated (default correlated)");
    simulate->add_option("--format", sim.format, "long or stacked panel layout");
    simulate->add_option("--out", sim.out, "output prefix")->required();

    EstimateArgs est;
    CLI::App* estimate = app.add_subcommand("estimate", "Estimate factor strengths from a panel file");
    estimate->add_option("--model", est.model, "vector or matrix")->required();
    estimate->add_option("--r", est.r, "number of factors (vector model)");
    estimate->add_option("--r1", est.r1, "mode-1 factor count (matrix model)");
    estimate->add_option("--r2", est.r2, "mode-2 factor count (matrix model)");
    estimate->add_option("--estimator", est.estimator, "pca or iterative_projection (matrix)");
    estimate->add_flag("--demean", est.demean, "subtract per-series means first");
    estimate->add_option("--input", est.input, "panel file")->required();
    estimate->add_option("--out", est.out, "report JSON path")->required();

    MonteCarloArgs mc;
    CLI::App* montecarlo = app.add_subcommand("montecarlo", "Run a replication grid from a JSON config");
    montecarlo->add_option("--config", mc.config, "MCConfig JSON path")->required();
    montecarlo->add_option("--out", mc.out, "output CSV path")->required();
    montecarlo->add_option("--reference", mc.reference, "reference table CSV to compare against");
    montecarlo->add_flag("--check", mc.check, "exit nonzero when the reference check fails");
    montecarlo->add_option("--mean-tol", mc.mean_tol, "mean tolerance (default 0.03)");
    montecarlo->add_option("--sd-factor", mc.sd_factor, "sd band factor (default 2)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& help) {
        return app.exit(help);
    } catch (const CLI::ParseError& err) {
        app.exit(err);
        return kExitUsage;
    }

    try {
        if (simulate->parsed()) return run_simulate(sim);
        if (estimate->parsed()) return run_estimate(est);
        if (montecarlo->parsed()) return run_montecarlo(mc);
    } catch (const CLI::ValidationError& err) {
        std::cerr << err.what() << '\n';
        return kExitUsage;
    } catch (const fsl::NonPositiveDiagonalError& err) {
        std::cerr << "degenerate estimate: " << err.what() << " (factor index " << err.factor
                  << ")\n";
        return kExitDegenerate;
    } catch (const fsl::NonPositiveTraceError& err) {
        std::cerr << "degenerate estimate: " << err.what() << '\n';
        return kExitDegenerate;
    } catch (const fsl::ParseError& err) {
        std::cerr << "parse error: " << err.what() << '\n';
        return kExitParse;
    } catch (const fsl::InvalidSpecError& err) {
        std::cerr << "invalid configuration: " << err.what() << '\n';
        return kExitUsage;
    } catch (const fsl::Error& err) {
        std::cerr << "error: " << err.what() << '\n';
        return 1;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return 1;
    }
    return kExitOk;
}
