#pragma once

#include <utility>

#include "fsl/estimators.hpp"
#include "fsl/types.hpp"

namespace fsl::strength {

/// Projection S = Q' Sigma Q of a second-moment matrix onto an estimated
/// loading basis. Its diagonal carries the strength signal.
struct SMatrix {
    Matrix S;  // r x r, symmetric

    explicit SMatrix(Matrix s);
    Index r() const { return S.rows(); }
};

/// S = Q' cov Q, symmetrized.
SMatrix project_s(const Matrix& Q, const est::CovMatrix& cov);

/// Vector-model strengths: d_hat[j] = S_jj, alpha_hat[j] = log(S_jj)/log(d).
/// Estimates outside [0, 1.5] are flagged as warnings, not clamped.
StrengthReport vector_strengths(const SMatrix& s, Index d);

/// Trace allocation between the two modes of a matrix model. The normalizers
/// satisfy g1*g2 = (tr S1 + tr S2)/2 and g1/(r1 d1) = g2/(r2 d2) by
/// construction.
struct TraceSplit {
    double g1_hat = 0.0;
    double g2_hat = 0.0;
    double trS1 = 0.0;
    double trS2 = 0.0;
};

TraceSplit matrix_traces(const SMatrix& s1, const SMatrix& s2, Index r1, Index d1, Index r2,
                         Index d2);

struct ModeDims {
    Index r1 = 0, d1 = 0;
    Index r2 = 0, d2 = 0;
};

/// Per-mode strengths: d_hat_{1,j} = s_{1,jj}/g2_hat and
/// alpha_hat_{1,j} = log(d_hat_{1,j})/log(d1); symmetrically for mode 2.
std::pair<StrengthReport, StrengthReport> matrix_strengths(const SMatrix& s1, const SMatrix& s2,
                                                           const ModeDims& dims);

/// A_hat = Q * diag(d_hat)^{1/2}.
LoadingEstimate assemble_loading(const Matrix& Q, const Vector& d_hat);

// ---------------------------------------------------------------------------
// End-to-end pipelines (covariance -> basis -> projection -> strengths).

struct VectorEstimateOptions {
    bool demean = false;  // subtract per-series means before the covariance
};

struct VectorEstimate {
    StrengthReport report;
    LoadingEstimate loading;
    Matrix s_matrix;         // projected second moment
    Vector top_eigenvalues;  // top-r eigenvalues of the sample covariance
};

VectorEstimate estimate_vector_panel(const VectorPanel& panel, Index r,
                                     const VectorEstimateOptions& opts = {});

enum class MatrixEstimator { mode_pca, iterative_projection };

struct MatrixEstimateOptions {
    MatrixEstimator estimator = MatrixEstimator::iterative_projection;
    est::ProjectionConfig projection;
    bool demean = false;
};

struct MatrixEstimate {
    StrengthReport report1, report2;
    TraceSplit traces;
    LoadingEstimate loading1, loading2;
    int iterations = 0;
    double final_delta = 0.0;
    bool converged = true;
};

MatrixEstimate estimate_matrix_panel(const MatrixPanel& panel, Index r1, Index r2,
                                     const MatrixEstimateOptions& opts = {});

}  // namespace fsl::strength
