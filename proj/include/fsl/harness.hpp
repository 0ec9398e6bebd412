#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fsl/dgp.hpp"
#include "fsl/strength.hpp"
#include "fsl/types.hpp"

namespace fsl::mc {

enum class Model { vector, matrix };

/// One grid point. Vector cells use d1 as the cross-section dimension and
/// leave d2 = 0.
struct GridCell {
    Index d1 = 0;
    Index d2 = 0;
    Index T = 0;
};

struct MCConfig {
    Model model = Model::vector;
    dgp::Setting setting = dgp::Setting::I;
    std::vector<GridCell> grid;
    int reps = 0;  // 0 picks the default: 500 (vector) or 100 (matrix)
    std::uint64_t base_seed = 0;
    strength::MatrixEstimator estimator = strength::MatrixEstimator::iterative_projection;
    dgp::NoiseSpec noise;

    int resolved_reps() const { return reps > 0 ? reps : (model == Model::vector ? 500 : 100); }
    void validate() const;
};

/// A single replication. alpha2 stays empty under the vector model.
struct RepOutcome {
    bool ok = false;
    Vector alpha1;
    Vector alpha2;
    std::string error;
};

/// Runs all replications of one grid cell. Replication i draws its stream
/// from base_seed XOR i, so results are independent of worker scheduling;
/// failed replications are recorded, never fatal.
std::vector<RepOutcome> run_cell(const MCConfig& config, const GridCell& cell);

struct TableRow {
    Model model = Model::vector;
    dgp::Setting setting = dgp::Setting::I;
    Index d1 = 0, d2 = 0, T = 0;
    int factor = 0;  // 1-based
    int mode = 0;    // 0 vector, 1/2 matrix modes
    double mean = 0.0;
    double sd = 0.0;
    long fails = 0;
};

struct MCTable {
    int reps = 0;
    std::vector<TableRow> rows;

    /// A cell stays valid while failures remain within 1% of replications.
    bool row_valid(const TableRow& row) const {
        return static_cast<double>(row.fails) <= 0.01 * static_cast<double>(reps);
    }
};

/// Aggregates run_cell across the grid; sd uses the unbiased (n-1)
/// denominator. Output is bit-identical regardless of the worker count.
MCTable run_grid(const MCConfig& config);

struct CellVerdict {
    TableRow row;
    double ref_mean = 0.0;
    double ref_sd = 0.0;
    bool mean_ok = false;
    bool sd_ok = false;
    bool valid = false;

    bool pass() const { return mean_ok && sd_ok && valid; }
};

struct CompareOutcome {
    std::vector<CellVerdict> verdicts;
    bool all_pass = true;
};

/// Per-cell comparison against reference rows: mean within mean_tol, sd
/// within a multiplicative sd_factor band. Every table row must have a
/// matching reference row (the reference may contain extra rows).
CompareOutcome compare_reference(const MCTable& table, const MCTable& reference, double mean_tol,
                                 double sd_factor);

/// Worker count: FSL_THREADS when set (>= 1), otherwise the hardware count.
int resolve_thread_count();

std::string to_string(Model model);
std::string to_string(dgp::Setting setting);

}  // namespace fsl::mc
