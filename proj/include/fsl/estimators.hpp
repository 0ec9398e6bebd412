#pragma once

#include "fsl/types.hpp"

namespace fsl::est {

/// Symmetric second-moment matrix. Accumulated through selfadjoint rank
/// updates, so stored values are exactly symmetric; the constructor rejects
/// anything asymmetric beyond 1e-10 relative.
struct CovMatrix {
    Matrix S;

    explicit CovMatrix(Matrix s);
    Index dim() const { return S.rows(); }
};

/// Non-centered second moment (1/T) X'X of a T x d panel.
CovMatrix sample_cov_vector(const VectorPanel& panel);

/// Mode-k second moment of a matrix panel:
/// mode 1: (1/T) sum_t X_t X_t' (d1 x d1); mode 2: (1/T) sum_t X_t' X_t.
/// Mode 2 reuses the mode-1 kernel on transposed slabs, so slab-transposing
/// the panel swaps the two outputs bit-for-bit.
CovMatrix mode_cov(const MatrixPanel& panel, int mode);

struct PcaResult {
    Matrix Q;            // dim x r, orthonormal, deterministic sign
    Vector eigenvalues;  // top r, descending
    bool rank_deficient = false;  // lambda_r <= 1e-12 * lambda_1
};

/// Top-r eigenvectors of the symmetrized input, eigenvalues descending.
/// Sign convention: in each column the entry of largest absolute value is
/// positive (ties broken towards the lowest index), making the output a
/// deterministic function of the input.
PcaResult pca_loadings(const CovMatrix& cov, Index r);

struct ProjectionConfig {
    int max_iters = 30;
    double tol = 1e-6;  // on ||QQ' - Q_prev Q_prev'||_F, max over modes
};

struct ProjectionResult {
    Matrix Q1;  // d1 x r1
    Matrix Q2;  // d2 x r2
    int iterations = 0;
    double final_delta = 0.0;
    bool converged = false;  // false carries a no-convergence warning; estimates still usable
};

/// Alternating mode-wise refinement: starting from per-mode PCA of the mode
/// covariances, each iteration recomputes Q1 from the slabs projected by the
/// previous Q2 and Q2 from the slabs projected by the previous Q1 (both from
/// the previous iterates, so the procedure commutes with slab transposition).
ProjectionResult iterative_projection(const MatrixPanel& panel, Index r1, Index r2,
                                      const ProjectionConfig& cfg = {});

}  // namespace fsl::est
