#include "fsl/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace fsl::io {

namespace {

using nlohmann::json;

std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t k = 0; k < line.size(); ++k) {
        const char c = line[k];
        if (quoted) {
            if (c == '"') {
                if (k + 1 < line.size() && line[k + 1] == '"') {
                    field.push_back('"');
                    ++k;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(field);
            field.clear();
        } else {
            field.push_back(c);
        }
    }
    fields.push_back(field);
    return fields;
}

std::string csv_escape(const std::string& value) {
    if (value.find_first_of(",\"\n") == std::string::npos) return value;
    std::string out = "\"";
    for (const char c : value) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

double parse_double(const std::string& text, std::size_t line_no) {
    char* end = nullptr;
    const double value = std::strtod(text.c_str(), &end);
    if (end == text.c_str()) {
        throw ParseError("line " + std::to_string(line_no) + ": cannot parse number '" + text + "'");
    }
    return value;
}

long parse_long(const std::string& text, std::size_t line_no) {
    char* end = nullptr;
    const long value = std::strtol(text.c_str(), &end, 10);
    if (end == text.c_str()) {
        throw ParseError("line " + std::to_string(line_no) + ": cannot parse integer '" + text + "'");
    }
    return value;
}

json vector_to_json(const Vector& v) {
    json arr = json::array();
    for (Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
    return arr;
}

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

json report_to_json(const StrengthReport& report) {
    json out;
    out["mode"] = to_string(report.mode);
    out["dim"] = report.dim;
    out["alpha_hat"] = vector_to_json(report.alpha_hat);
    out["d_hat"] = vector_to_json(report.d_hat);
    if (report.g_hat.has_value()) {
        out["g_hat"] = *report.g_hat;
    } else {
        out["g_hat"] = nullptr;
    }
    out["off_diagonal_ratio"] = report.off_diagonal_ratio;
    out["warnings"] = report.warnings;
    return out;
}

void write_json_file(const std::filesystem::path& path, const json& payload) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write " + path.string());
    out << payload.dump(2) << "\n";
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& err) {
        throw ParseError(path.string() + ": " + err.what());
    }
}

bool looks_like_long_header(const std::vector<std::string>& lines) {
    for (const std::string& line : lines) {
        if (line.empty()) continue;
        return line.rfind("t,", 0) == 0;
    }
    return false;
}

// Blocks of consecutive non-blank lines, parsed as comma-separated numbers.
std::vector<Matrix> parse_stacked_blocks(const std::vector<std::string>& lines) {
    std::vector<Matrix> blocks;
    std::vector<std::vector<double>> current;
    std::size_t width = 0;
    auto flush = [&]() {
        if (current.empty()) return;
        Matrix block(static_cast<Index>(current.size()), static_cast<Index>(width));
        for (std::size_t i = 0; i < current.size(); ++i) {
            for (std::size_t j = 0; j < width; ++j) block(static_cast<Index>(i), static_cast<Index>(j)) = current[i][j];
        }
        blocks.push_back(std::move(block));
        current.clear();
    };
    for (std::size_t n = 0; n < lines.size(); ++n) {
        const std::string& line = lines[n];
        if (line.find_first_not_of(" \t") == std::string::npos) {
            flush();
            continue;
        }
        const std::vector<std::string> fields = split_csv(line);
        std::vector<double> row;
        row.reserve(fields.size());
        for (const std::string& field : fields) row.push_back(parse_double(field, n + 1));
        if (current.empty()) {
            width = row.size();
        } else if (row.size() != width) {
            throw ParseError("line " + std::to_string(n + 1) + ": ragged row in stacked panel");
        }
        current.push_back(std::move(row));
    }
    flush();
    if (blocks.empty()) throw ParseError("stacked panel has no data");
    for (const Matrix& block : blocks) {
        if (block.rows() != blocks.front().rows() || block.cols() != blocks.front().cols()) {
            throw ParseError("stacked panel blocks have inconsistent shapes");
        }
    }
    return blocks;
}

struct LongEntry {
    long t, i, j;
    double value;
};

std::vector<LongEntry> parse_long_rows(const std::vector<std::string>& lines, bool with_j) {
    std::vector<LongEntry> entries;
    bool header_seen = false;
    for (std::size_t n = 0; n < lines.size(); ++n) {
        const std::string& line = lines[n];
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        if (!header_seen) {
            const std::string expected = with_j ? "t,i,j,value" : "t,i,value";
            if (line != expected) {
                throw ParseError("expected header '" + expected + "', got '" + line + "'");
            }
            header_seen = true;
            continue;
        }
        const std::vector<std::string> fields = split_csv(line);
        const std::size_t expected_fields = with_j ? 4 : 3;
        if (fields.size() != expected_fields) {
            throw ParseError("line " + std::to_string(n + 1) + ": expected " +
                             std::to_string(expected_fields) + " fields");
        }
        LongEntry entry{};
        entry.t = parse_long(fields[0], n + 1);
        entry.i = parse_long(fields[1], n + 1);
        entry.j = with_j ? parse_long(fields[2], n + 1) : 1;
        entry.value = parse_double(fields[with_j ? 3 : 2], n + 1);
        if (entry.t < 1 || entry.i < 1 || entry.j < 1) {
            throw ParseError("line " + std::to_string(n + 1) + ": indices are 1-based");
        }
        entries.push_back(entry);
    }
    if (!header_seen || entries.empty()) throw ParseError("long panel has no data rows");
    return entries;
}

void check_meta_dims(const PanelMeta& meta, const std::string& model, Index T, Index d1, Index d2) {
    if (!meta.model.empty() && meta.model != model) {
        throw ParseError("sidecar declares model '" + meta.model + "', expected '" + model + "'");
    }
    if (meta.T != 0 && meta.T != T) throw ParseError("sidecar T does not match panel data");
    if (meta.d1 != 0 && meta.d1 != d1) throw ParseError("sidecar d1 does not match panel data");
    if (model == "matrix" && meta.d2 != 0 && meta.d2 != d2) {
        throw ParseError("sidecar d2 does not match panel data");
    }
}

std::string model_name(mc::Model model) { return mc::to_string(model); }

}  // namespace

std::string format_double(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

std::filesystem::path meta_path_for(const std::filesystem::path& panel_path) {
    std::filesystem::path meta = panel_path;
    meta.replace_extension();
    meta += ".meta.json";
    return meta;
}

void write_panel_meta(const std::filesystem::path& panel_path, const PanelMeta& meta) {
    json payload;
    payload["model"] = meta.model;
    payload["T"] = meta.T;
    if (meta.model == "vector") {
        payload["d"] = meta.d1;
    } else {
        payload["d1"] = meta.d1;
        payload["d2"] = meta.d2;
    }
    if (!meta.row_labels.empty()) payload["row_labels"] = meta.row_labels;
    if (!meta.col_labels.empty()) payload["col_labels"] = meta.col_labels;
    write_json_file(meta_path_for(panel_path), payload);
}

std::optional<PanelMeta> read_panel_meta(const std::filesystem::path& panel_path) {
    const std::filesystem::path path = meta_path_for(panel_path);
    if (!std::filesystem::exists(path)) return std::nullopt;
    const json payload = read_json_file(path);
    PanelMeta meta;
    try {
        meta.model = payload.value("model", std::string{});
        meta.T = payload.value("T", 0);
        meta.d1 = payload.contains("d") ? payload["d"].get<Index>() : payload.value("d1", 0);
        meta.d2 = payload.value("d2", 0);
        if (payload.contains("row_labels")) {
            meta.row_labels = payload["row_labels"].get<std::vector<std::string>>();
        }
        if (payload.contains("col_labels")) {
            meta.col_labels = payload["col_labels"].get<std::vector<std::string>>();
        }
    } catch (const json::exception& err) {
        throw ParseError(path.string() + ": " + err.what());
    }
    return meta;
}

void write_vector_panel(const std::filesystem::path& path, const VectorPanel& panel,
                        PanelFormat format) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write " + path.string());
    if (format == PanelFormat::long_csv) {
        out << "t,i,value\n";
        for (Index t = 0; t < panel.T(); ++t) {
            for (Index i = 0; i < panel.dim(); ++i) {
                out << (t + 1) << ',' << (i + 1) << ',' << format_double(panel.data(t, i)) << '\n';
            }
        }
        return;
    }
    for (Index t = 0; t < panel.T(); ++t) {
        for (Index i = 0; i < panel.dim(); ++i) {
            if (i > 0) out << ',';
            out << format_double(panel.data(t, i));
        }
        out << "\n\n";
    }
}

void write_matrix_panel(const std::filesystem::path& path, const MatrixPanel& panel,
                        PanelFormat format) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write " + path.string());
    if (format == PanelFormat::long_csv) {
        out << "t,i,j,value\n";
        for (Index t = 0; t < panel.T(); ++t) {
            const Matrix& slab = panel.slabs[static_cast<std::size_t>(t)];
            for (Index i = 0; i < panel.d1(); ++i) {
                for (Index j = 0; j < panel.d2(); ++j) {
                    out << (t + 1) << ',' << (i + 1) << ',' << (j + 1) << ','
                        << format_double(slab(i, j)) << '\n';
                }
            }
        }
        return;
    }
    for (Index t = 0; t < panel.T(); ++t) {
        const Matrix& slab = panel.slabs[static_cast<std::size_t>(t)];
        for (Index i = 0; i < panel.d1(); ++i) {
            for (Index j = 0; j < panel.d2(); ++j) {
                if (j > 0) out << ',';
                out << format_double(slab(i, j));
            }
            out << '\n';
        }
        out << '\n';
    }
}

VectorPanel read_vector_panel(const std::filesystem::path& path) {
    const std::vector<std::string> lines = read_lines(path);
    const std::optional<PanelMeta> meta = read_panel_meta(path);
    VectorPanel panel;
    if (looks_like_long_header(lines)) {
        const std::vector<LongEntry> entries = parse_long_rows(lines, /*with_j=*/false);
        long T = 0;
        long d = 0;
        for (const LongEntry& e : entries) {
            T = std::max(T, e.t);
            d = std::max(d, e.i);
        }
        if (static_cast<long>(entries.size()) != T * d) {
            throw ParseError("long panel coverage is incomplete or duplicated");
        }
        panel.data.resize(T, d);
        std::vector<char> seen(static_cast<std::size_t>(T * d), 0);
        for (const LongEntry& e : entries) {
            const std::size_t slot = static_cast<std::size_t>((e.t - 1) * d + (e.i - 1));
            if (seen[slot]) throw ParseError("duplicate (t,i) index in long panel");
            seen[slot] = 1;
            panel.data(e.t - 1, e.i - 1) = e.value;
        }
    } else {
        const std::vector<Matrix> blocks = parse_stacked_blocks(lines);
        if (blocks.front().rows() != 1) {
            throw ParseError("stacked vector panel needs one row per time block");
        }
        panel.data.resize(static_cast<Index>(blocks.size()), blocks.front().cols());
        for (std::size_t t = 0; t < blocks.size(); ++t) {
            panel.data.row(static_cast<Index>(t)) = blocks[t].row(0);
        }
    }
    if (meta.has_value()) check_meta_dims(*meta, "vector", panel.T(), panel.dim(), 0);
    return panel;
}

MatrixPanel read_matrix_panel(const std::filesystem::path& path) {
    const std::vector<std::string> lines = read_lines(path);
    const std::optional<PanelMeta> meta = read_panel_meta(path);
    MatrixPanel panel;
    if (looks_like_long_header(lines)) {
        const std::vector<LongEntry> entries = parse_long_rows(lines, /*with_j=*/true);
        long T = 0;
        long d1 = 0;
        long d2 = 0;
        for (const LongEntry& e : entries) {
            T = std::max(T, e.t);
            d1 = std::max(d1, e.i);
            d2 = std::max(d2, e.j);
        }
        if (static_cast<long>(entries.size()) != T * d1 * d2) {
            throw ParseError("long panel coverage is incomplete or duplicated");
        }
        panel.slabs.assign(static_cast<std::size_t>(T), Matrix::Zero(d1, d2));
        std::vector<char> seen(static_cast<std::size_t>(T * d1 * d2), 0);
        for (const LongEntry& e : entries) {
            const std::size_t slot =
                static_cast<std::size_t>(((e.t - 1) * d1 + (e.i - 1)) * d2 + (e.j - 1));
            if (seen[slot]) throw ParseError("duplicate (t,i,j) index in long panel");
            seen[slot] = 1;
            panel.slabs[static_cast<std::size_t>(e.t - 1)](e.i - 1, e.j - 1) = e.value;
        }
    } else {
        panel.slabs = parse_stacked_blocks(lines);
    }
    if (meta.has_value()) check_meta_dims(*meta, "matrix", panel.T(), panel.d1(), panel.d2());
    return panel;
}

void write_vector_truth(const std::filesystem::path& path, const VectorGroundTruth& truth,
                        const Vector& target_alpha) {
    json payload;
    payload["model"] = "vector";
    payload["realized_alpha"] = vector_to_json(truth.realized_alpha);
    payload["target_alpha"] = vector_to_json(target_alpha);
    payload["loading"] = matrix_to_json(truth.A);
    write_json_file(path, payload);
}

void write_matrix_truth(const std::filesystem::path& path, const MatrixGroundTruth& truth,
                        const Vector& target_alpha1, const Vector& target_alpha2) {
    json payload;
    payload["model"] = "matrix";
    payload["realized_alpha1"] = vector_to_json(truth.realized_alpha1);
    payload["realized_alpha2"] = vector_to_json(truth.realized_alpha2);
    payload["target_alpha1"] = vector_to_json(target_alpha1);
    payload["target_alpha2"] = vector_to_json(target_alpha2);
    payload["loading1"] = matrix_to_json(truth.A1);
    payload["loading2"] = matrix_to_json(truth.A2);
    write_json_file(path, payload);
}

void write_vector_report(const std::filesystem::path& path, const strength::VectorEstimate& estimate,
                         const ReportFileInfo& info) {
    json payload;
    payload["model"] = info.model;
    payload["estimator"] = info.estimator;
    payload["demean"] = info.demean;
    payload["input"] = info.input;
    payload["reports"] = json::array({report_to_json(estimate.report)});
    payload["top_eigenvalues"] = vector_to_json(estimate.top_eigenvalues);
    write_json_file(path, payload);
}

void write_matrix_report(const std::filesystem::path& path, const strength::MatrixEstimate& estimate,
                         const ReportFileInfo& info) {
    json payload;
    payload["model"] = info.model;
    payload["estimator"] = info.estimator;
    payload["demean"] = info.demean;
    payload["input"] = info.input;
    payload["reports"] = json::array({report_to_json(estimate.report1), report_to_json(estimate.report2)});
    payload["traces"] = {
        {"g1_hat", estimate.traces.g1_hat},
        {"g2_hat", estimate.traces.g2_hat},
        {"trS1", estimate.traces.trS1},
        {"trS2", estimate.traces.trS2},
    };
    payload["iterations"] = estimate.iterations;
    payload["final_delta"] = estimate.final_delta;
    payload["converged"] = estimate.converged;
    write_json_file(path, payload);
}

void write_loadings_csv(const std::filesystem::path& path, const Matrix& loading,
                        const std::vector<std::string>& labels) {
    if (!labels.empty() && static_cast<Index>(labels.size()) != loading.rows()) {
        throw DimMismatchError("label count does not match loading rows");
    }
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write " + path.string());
    out << "label";
    for (Index j = 0; j < loading.cols(); ++j) out << ",factor_" << (j + 1);
    out << '\n';
    for (Index i = 0; i < loading.rows(); ++i) {
        if (labels.empty()) {
            out << (i + 1);
        } else {
            out << csv_escape(labels[static_cast<std::size_t>(i)]);
        }
        for (Index j = 0; j < loading.cols(); ++j) out << ',' << format_double(loading(i, j));
        out << '\n';
    }
}

void write_table_csv(const std::filesystem::path& path, const mc::MCTable& table) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write " + path.string());
    out << "model,setting,d1,d2,T,factor,mode,mean,sd,fails\n";
    for (const mc::TableRow& row : table.rows) {
        out << model_name(row.model) << ',' << mc::to_string(row.setting) << ',' << row.d1 << ','
            << row.d2 << ',' << row.T << ',' << row.factor << ',' << row.mode << ','
            << format_double(row.mean) << ',' << format_double(row.sd) << ',' << row.fails << '\n';
    }
}

mc::MCTable read_table_csv(const std::filesystem::path& path) {
    const std::vector<std::string> lines = read_lines(path);
    mc::MCTable table;
    bool header_seen = false;
    for (std::size_t n = 0; n < lines.size(); ++n) {
        const std::string& line = lines[n];
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        if (!header_seen) {
            if (line != "model,setting,d1,d2,T,factor,mode,mean,sd,fails") {
                throw ParseError(path.string() + ": unexpected table header");
            }
            header_seen = true;
            continue;
        }
        const std::vector<std::string> fields = split_csv(line);
        if (fields.size() != 10) {
            throw ParseError("line " + std::to_string(n + 1) + ": expected 10 fields");
        }
        mc::TableRow row;
        if (fields[0] == "vector") {
            row.model = mc::Model::vector;
        } else if (fields[0] == "matrix") {
            row.model = mc::Model::matrix;
        } else {
            throw ParseError("line " + std::to_string(n + 1) + ": unknown model '" + fields[0] + "'");
        }
        if (fields[1] == "I") {
            row.setting = dgp::Setting::I;
        } else if (fields[1] == "II") {
            row.setting = dgp::Setting::II;
        } else {
            throw ParseError("line " + std::to_string(n + 1) + ": unknown setting '" + fields[1] + "'");
        }
        row.d1 = parse_long(fields[2], n + 1);
        row.d2 = parse_long(fields[3], n + 1);
        row.T = parse_long(fields[4], n + 1);
        row.factor = static_cast<int>(parse_long(fields[5], n + 1));
        row.mode = static_cast<int>(parse_long(fields[6], n + 1));
        row.mean = parse_double(fields[7], n + 1);
        row.sd = parse_double(fields[8], n + 1);
        row.fails = parse_long(fields[9], n + 1);
        table.rows.push_back(row);
    }
    if (!header_seen) throw ParseError(path.string() + ": empty table");
    return table;
}

void write_table_json(const std::filesystem::path& path, const mc::MCTable& table) {
    json payload;
    payload["reps"] = table.reps;
    json rows = json::array();
    for (const mc::TableRow& row : table.rows) {
        rows.push_back({
            {"model", model_name(row.model)},
            {"setting", mc::to_string(row.setting)},
            {"d1", row.d1},
            {"d2", row.d2},
            {"T", row.T},
            {"factor", row.factor},
            {"mode", row.mode},
            {"mean", row.mean},
            {"sd", row.sd},
            {"fails", row.fails},
            {"valid", table.row_valid(row)},
        });
    }
    payload["rows"] = std::move(rows);
    write_json_file(path, payload);
}

mc::MCConfig read_mc_config(const std::filesystem::path& path) {
    const json payload = read_json_file(path);
    mc::MCConfig config;
    try {
        const std::string model = payload.at("model").get<std::string>();
        if (model == "vector") {
            config.model = mc::Model::vector;
        } else if (model == "matrix") {
            config.model = mc::Model::matrix;
        } else {
            throw ParseError("unknown model '" + model + "'");
        }
        const std::string setting = payload.value("setting", "I");
        if (setting == "I") {
            config.setting = dgp::Setting::I;
        } else if (setting == "II") {
            config.setting = dgp::Setting::II;
        } else {
            throw ParseError("unknown setting '" + setting + "'");
        }
        for (const json& cell_json : payload.at("grid")) {
            mc::GridCell cell;
            if (config.model == mc::Model::vector) {
                cell.d1 = cell_json.contains("d") ? cell_json["d"].get<Index>()
                                                  : cell_json.at("d1").get<Index>();
                cell.d2 = 0;
            } else {
                cell.d1 = cell_json.at("d1").get<Index>();
                cell.d2 = cell_json.at("d2").get<Index>();
            }
            cell.T = cell_json.at("T").get<Index>();
            config.grid.push_back(cell);
        }
        config.reps = payload.value("reps", 0);
        config.base_seed = payload.value("base_seed", static_cast<std::uint64_t>(0));
        const std::string estimator = payload.value("estimator", "iterative_projection");
        if (estimator == "pca" || estimator == "mode_pca") {
            config.estimator = strength::MatrixEstimator::mode_pca;
        } else if (estimator == "iterative_projection" || estimator == "iproj") {
            config.estimator = strength::MatrixEstimator::iterative_projection;
        } else {
            throw ParseError("unknown estimator '" + estimator + "'");
        }
        if (payload.contains("noise")) {
            const json& noise = payload["noise"];
            const std::string kind = noise.value("kind", "correlated");
            if (kind == "iid" || kind == "iid_gaussian") {
                config.noise.kind = dgp::NoiseKind::iid_gaussian;
            } else if (kind == "correlated") {
                config.noise.kind = dgp::NoiseKind::correlated;
            } else {
                throw ParseError("unknown noise kind '" + kind + "'");
            }
            config.noise.cross_rho = noise.value("cross_rho", 0.2);
            config.noise.serial_phi = noise.value("serial_phi", 0.2);
            config.noise.delta = noise.value("delta", 2.0);
        }
    } catch (const json::exception& err) {
        throw ParseError(path.string() + ": " + err.what());
    }
    config.validate();
    return config;
}

void write_mc_config(const std::filesystem::path& path, const mc::MCConfig& config) {
    json payload;
    payload["model"] = model_name(config.model);
    payload["setting"] = mc::to_string(config.setting);
    json grid = json::array();
    for (const mc::GridCell& cell : config.grid) {
        if (config.model == mc::Model::vector) {
            grid.push_back({{"d", cell.d1}, {"T", cell.T}});
        } else {
            grid.push_back({{"d1", cell.d1}, {"d2", cell.d2}, {"T", cell.T}});
        }
    }
    payload["grid"] = std::move(grid);
    payload["reps"] = config.resolved_reps();
    payload["base_seed"] = config.base_seed;
    payload["estimator"] = config.estimator == strength::MatrixEstimator::mode_pca
                               ? "pca"
                               : "iterative_projection";
    payload["noise"] = {
        {"kind", config.noise.kind == dgp::NoiseKind::iid_gaussian ? "iid_gaussian" : "correlated"},
        {"cross_rho", config.noise.cross_rho},
        {"serial_phi", config.noise.serial_phi},
        {"delta", config.noise.delta},
    };
    write_json_file(path, payload);
}

}  // namespace fsl::io
