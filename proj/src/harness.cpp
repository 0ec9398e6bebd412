#include "fsl/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>

namespace fsl::mc {

namespace {

RepOutcome run_replication(const MCConfig& config, const GridCell& cell, int rep) {
    const std::uint64_t seed = config.base_seed ^ static_cast<std::uint64_t>(rep);
    RepOutcome outcome;
    try {
        if (config.model == Model::vector) {
            dgp::VectorDGPSpec spec;
            spec.d = cell.d1;
            spec.r = 2;
            spec.T = cell.T;
            spec.zeta = dgp::zeta_for_setting(config.setting);
            spec.noise = config.noise;
            spec.seed = seed;
            auto [panel, truth] = dgp::simulate_vector(spec);
            (void)truth;
            outcome.alpha1 = strength::estimate_vector_panel(panel, spec.r).report.alpha_hat;
        } else {
            dgp::MatrixDGPSpec spec;
            spec.d1 = cell.d1;
            spec.d2 = cell.d2;
            spec.r1 = 2;
            spec.r2 = 2;
            spec.T = cell.T;
            spec.zeta1 = dgp::zeta_for_setting(config.setting);
            spec.zeta2 = dgp::zeta_for_setting(config.setting);
            spec.noise = config.noise;
            spec.seed = seed;
            auto [panel, truth] = dgp::simulate_matrix(spec);
            (void)truth;
            strength::MatrixEstimateOptions opts;
            opts.estimator = config.estimator;
            auto estimate = strength::estimate_matrix_panel(panel, spec.r1, spec.r2, opts);
            outcome.alpha1 = std::move(estimate.report1.alpha_hat);
            outcome.alpha2 = std::move(estimate.report2.alpha_hat);
        }
        outcome.ok = true;
    } catch (const std::exception& err) {
        outcome.ok = false;
        outcome.error = err.what();
    }
    return outcome;
}

struct FactorStats {
    double mean = std::numeric_limits<double>::quiet_NaN();
    double sd = std::numeric_limits<double>::quiet_NaN();
};

FactorStats aggregate_factor(const std::vector<RepOutcome>& outcomes, bool mode2, Index factor) {
    double sum = 0.0;
    long n = 0;
    for (const RepOutcome& outcome : outcomes) {
        if (!outcome.ok) continue;
        sum += (mode2 ? outcome.alpha2 : outcome.alpha1)(factor);
        ++n;
    }
    FactorStats stats;
    if (n == 0) return stats;
    stats.mean = sum / static_cast<double>(n);
    if (n == 1) {
        stats.sd = 0.0;
        return stats;
    }
    double ss = 0.0;
    for (const RepOutcome& outcome : outcomes) {
        if (!outcome.ok) continue;
        const double diff = (mode2 ? outcome.alpha2 : outcome.alpha1)(factor) - stats.mean;
        ss += diff * diff;
    }
    stats.sd = std::sqrt(ss / static_cast<double>(n - 1));
    return stats;
}

}  // namespace

void MCConfig::validate() const {
    if (grid.empty()) throw InvalidSpecError("Monte Carlo grid must be nonempty");
    if (reps < 0) throw InvalidSpecError("replication count must be >= 1 (0 selects the default)");
    for (const GridCell& cell : grid) {
        if (cell.d1 < 3 || cell.T < 2) {
            throw InvalidSpecError("grid cells need d >= 3 and T >= 2");
        }
        if (model == Model::matrix && cell.d2 < 3) {
            throw InvalidSpecError("matrix grid cells need d2 >= 3");
        }
    }
    noise.validate();
}

std::vector<RepOutcome> run_cell(const MCConfig& config, const GridCell& cell) {
    config.validate();
    const int reps = config.resolved_reps();
    std::vector<RepOutcome> outcomes(static_cast<std::size_t>(reps));
    const int workers = std::max(1, std::min(resolve_thread_count(), reps));
    if (workers == 1) {
        for (int i = 0; i < reps; ++i) outcomes[static_cast<std::size_t>(i)] = run_replication(config, cell, i);
        return outcomes;
    }
    std::atomic<int> next{0};
    auto drain = [&] {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= reps) break;
            outcomes[static_cast<std::size_t>(i)] = run_replication(config, cell, i);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(drain);
    for (auto& worker : pool) worker.join();
    return outcomes;
}

MCTable run_grid(const MCConfig& config) {
    config.validate();
    MCTable table;
    table.reps = config.resolved_reps();
    for (const GridCell& cell : config.grid) {
        const std::vector<RepOutcome> outcomes = run_cell(config, cell);
        long fails = 0;
        for (const RepOutcome& outcome : outcomes) {
            if (!outcome.ok) ++fails;
        }
        Index r1 = 0;
        Index r2 = 0;
        for (const RepOutcome& outcome : outcomes) {
            if (outcome.ok) {
                r1 = outcome.alpha1.size();
                r2 = outcome.alpha2.size();
                break;
            }
        }
        auto append = [&](int mode, bool use_mode2, Index count) {
            for (Index j = 0; j < count; ++j) {
                const FactorStats stats = aggregate_factor(outcomes, use_mode2, j);
                TableRow row;
                row.model = config.model;
                row.setting = config.setting;
                row.d1 = cell.d1;
                row.d2 = cell.d2;
                row.T = cell.T;
                row.factor = static_cast<int>(j) + 1;
                row.mode = mode;
                row.mean = stats.mean;
                row.sd = stats.sd;
                row.fails = fails;
                table.rows.push_back(row);
            }
        };
        if (config.model == Model::vector) {
            append(0, false, r1);
        } else {
            append(1, false, r1);
            append(2, true, r2);
        }
    }
    return table;
}

CompareOutcome compare_reference(const MCTable& table, const MCTable& reference, double mean_tol,
                                 double sd_factor) {
    if (!(mean_tol > 0.0) || sd_factor < 1.0) {
        throw InvalidSpecError("compare needs mean_tol > 0 and sd_factor >= 1");
    }
    CompareOutcome outcome;
    for (const TableRow& row : table.rows) {
        const TableRow* match = nullptr;
        for (const TableRow& ref : reference.rows) {
            if (ref.model == row.model && ref.setting == row.setting && ref.d1 == row.d1 &&
                ref.d2 == row.d2 && ref.T == row.T && ref.factor == row.factor &&
                ref.mode == row.mode) {
                match = &ref;
                break;
            }
        }
        if (match == nullptr) {
            throw ShapeMismatchError("no reference row for (" + to_string(row.model) + ", " +
                                     to_string(row.setting) + ", d1=" + std::to_string(row.d1) +
                                     ", d2=" + std::to_string(row.d2) + ", T=" + std::to_string(row.T) +
                                     ", factor=" + std::to_string(row.factor) +
                                     ", mode=" + std::to_string(row.mode) + ")");
        }
        CellVerdict verdict;
        verdict.row = row;
        verdict.ref_mean = match->mean;
        verdict.ref_sd = match->sd;
        verdict.mean_ok = std::abs(row.mean - match->mean) <= mean_tol;
        verdict.sd_ok = row.sd >= match->sd / sd_factor && row.sd <= match->sd * sd_factor;
        verdict.valid = table.row_valid(row);
        outcome.all_pass = outcome.all_pass && verdict.pass();
        outcome.verdicts.push_back(verdict);
    }
    return outcome;
}

int resolve_thread_count() {
    if (const char* env = std::getenv("FSL_THREADS")) {
        char* end = nullptr;
        const long parsed = std::strtol(env, &end, 10);
        if (end != env && parsed >= 1) return static_cast<int>(parsed);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

std::string to_string(Model model) { return model == Model::vector ? "vector" : "matrix"; }

std::string to_string(dgp::Setting setting) { return setting == dgp::Setting::I ? "I" : "II"; }

}  // namespace fsl::mc
