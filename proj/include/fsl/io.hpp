#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fsl/harness.hpp"
#include "fsl/strength.hpp"
#include "fsl/types.hpp"

namespace fsl::io {

/// Doubles are serialized with 17 significant digits so that write-then-read
/// reproduces every value bit-for-bit.
std::string format_double(double value);

enum class PanelFormat { long_csv, stacked_csv };

/// Optional sidecar describing a panel file. Lives next to the panel as
/// <stem>.meta.json.
struct PanelMeta {
    std::string model;  // "vector" or "matrix"
    Index T = 0;
    Index d1 = 0;  // d for vector panels
    Index d2 = 0;
    std::vector<std::string> row_labels;  // length d1 (d for vector)
    std::vector<std::string> col_labels;  // length d2, matrix only
};

std::filesystem::path meta_path_for(const std::filesystem::path& panel_path);

void write_panel_meta(const std::filesystem::path& panel_path, const PanelMeta& meta);
std::optional<PanelMeta> read_panel_meta(const std::filesystem::path& panel_path);

/// long_csv: header `t,i,value` (vector) or `t,i,j,value` (matrix), 1-based
/// indices, complete and unique coverage required on read.
/// stacked_csv: T blocks of d1 rows x d2 comma-separated columns separated by
/// blank lines; vector panels use one row per block.
void write_vector_panel(const std::filesystem::path& path, const VectorPanel& panel,
                        PanelFormat format);
void write_matrix_panel(const std::filesystem::path& path, const MatrixPanel& panel,
                        PanelFormat format);

/// Readers auto-detect the format (header line vs bare numbers) and check the
/// sidecar dimensions when one is present.
VectorPanel read_vector_panel(const std::filesystem::path& path);
MatrixPanel read_matrix_panel(const std::filesystem::path& path);

void write_vector_truth(const std::filesystem::path& path, const VectorGroundTruth& truth,
                        const Vector& target_alpha);
void write_matrix_truth(const std::filesystem::path& path, const MatrixGroundTruth& truth,
                        const Vector& target_alpha1, const Vector& target_alpha2);

/// Strength report files: JSON with per-mode arrays plus estimator metadata.
struct ReportFileInfo {
    std::string model;      // "vector" or "matrix"
    std::string estimator;  // "pca" or "iterative_projection"
    bool demean = false;
    std::string input;  // panel path echoed for provenance
};

void write_vector_report(const std::filesystem::path& path, const strength::VectorEstimate& estimate,
                         const ReportFileInfo& info);
void write_matrix_report(const std::filesystem::path& path, const strength::MatrixEstimate& estimate,
                         const ReportFileInfo& info);

/// Loading matrix as CSV for external heatmap rendering; labels default to
/// 1-based indices when empty.
void write_loadings_csv(const std::filesystem::path& path, const Matrix& loading,
                        const std::vector<std::string>& labels);

/// Monte Carlo tables: CSV columns
/// model,setting,d1,d2,T,factor,mode,mean,sd,fails.
void write_table_csv(const std::filesystem::path& path, const mc::MCTable& table);
mc::MCTable read_table_csv(const std::filesystem::path& path);
void write_table_json(const std::filesystem::path& path, const mc::MCTable& table);

mc::MCConfig read_mc_config(const std::filesystem::path& path);
void write_mc_config(const std::filesystem::path& path, const mc::MCConfig& config);

}  // namespace fsl::io
