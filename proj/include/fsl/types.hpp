#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "fsl/errors.hpp"

namespace fsl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Observed vector time series, time-major: row t holds x_t'.
struct VectorPanel {
    Matrix data;  // T x d

    Index T() const { return data.rows(); }
    Index dim() const { return data.cols(); }
};

/// Observed matrix time series: slab t holds X_t (d1 x d2).
struct MatrixPanel {
    std::vector<Matrix> slabs;

    Index T() const { return static_cast<Index>(slabs.size()); }
    Index d1() const { return slabs.empty() ? 0 : slabs.front().rows(); }
    Index d2() const { return slabs.empty() ? 0 : slabs.front().cols(); }
};

/// Checks finiteness and minimal dimensions; returns the panel untouched.
const VectorPanel& validate_panel(const VectorPanel& panel);
const MatrixPanel& validate_panel(const MatrixPanel& panel);

/// New panel whose slabs are the transposes of the input slabs.
MatrixPanel transpose_slabs(const MatrixPanel& panel);

/// Per-column realized strengths log(||a_j||^2) / log(d).
Vector realized_strengths(const Matrix& loading);

/// Orthonormal basis, estimated column scales, and the assembled loading
/// A_hat = Q * diag(d_hat)^{1/2}.
struct LoadingEstimate {
    Matrix Q;       // dim x r, orthonormal columns
    Vector d_hat;   // r positive scales
    Matrix A_hat;   // dim x r
};

enum class StrengthMode { vector_mode, matrix_mode1, matrix_mode2 };

std::string to_string(StrengthMode mode);

struct StrengthReport {
    StrengthMode mode = StrengthMode::vector_mode;
    Index dim = 0;                    // dimension entering the log ratio (d or d_k)
    Vector alpha_hat;                 // length r
    Vector d_hat;                     // length r, positive
    std::optional<double> g_hat;      // trace normalizer for this mode (matrix models)
    double off_diagonal_ratio = 0.0;  // ||S - diag(S)||_F / ||S||_F
    std::vector<std::string> warnings;
};

/// Simulation ground truth retained for scoring (vector model).
struct VectorGroundTruth {
    Matrix A;               // d x r
    Matrix F;               // T x r factor series
    Vector realized_alpha;  // length r
};

/// Simulation ground truth for the matrix model. F_slabs[t] is the r1 x r2
/// factor matrix at time t.
struct MatrixGroundTruth {
    Matrix A1;  // d1 x r1
    Matrix A2;  // d2 x r2
    std::vector<Matrix> F_slabs;
    Vector realized_alpha1;
    Vector realized_alpha2;
};

}  // namespace fsl
