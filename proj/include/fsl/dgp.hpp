#pragma once

#include <cstdint>
#include <utility>

#include "fsl/rng.hpp"
#include "fsl/types.hpp"

namespace fsl::dgp {

enum class NoiseKind { iid_gaussian, correlated };

/// Noise configuration. `delta` is the signal-to-noise ratio: entries are
/// scaled so the population per-entry variance is exactly 1/delta^2.
struct NoiseSpec {
    NoiseKind kind = NoiseKind::correlated;
    double cross_rho = 0.2;   // banded cross-correlation decay, Toeplitz rho^|i-j|
    double serial_phi = 0.2;  // AR(1) coefficient of the noise innovations
    double delta = 2.0;

    void validate() const;
};

struct VectorDGPSpec {
    Index d = 0;
    Index r = 0;
    Index T = 0;
    Vector zeta;            // length r, nondecreasing, in [0, 0.5]
    double ar_coef = 0.8;   // factor AR(1) coefficient
    NoiseSpec noise;
    std::uint64_t seed = 0;

    void validate() const;
};

struct MatrixDGPSpec {
    Index d1 = 0, d2 = 0;
    Index r1 = 0, r2 = 0;
    Index T = 0;
    Vector zeta1, zeta2;
    double ar_coef = 0.8;
    NoiseSpec noise;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Strength settings used by the replication harness: (I) one pervasive and
/// one weak factor, zeta = (0, 0.2); (II) two weak factors, zeta = (0.1, 0.2).
enum class Setting { I, II };

Vector zeta_for_setting(Setting setting);

/// Loading matrix A with A_ij = B_ij * d^{-zeta_j}, B iid U(-sqrt3, sqrt3),
/// plus the realized strengths of its columns. Columns are only approximately
/// orthogonal (finite-sample B). Draws are consumed column by column.
std::pair<Matrix, Vector> gen_loading(Index d, Index r, const Vector& zeta, Rng& rng);

/// T x n matrix of independent standardized AR(1) series:
/// f_t = phi f_{t-1} + sqrt(1-phi^2) z_t with stationary N(0,1) start, so the
/// marginal variance is 1 without burn-in. Series are drawn one at a time.
Matrix gen_factor_series(Index T, Index n_series, double ar_coef, Rng& rng);

/// T x d noise panel with per-entry population variance exactly 1/delta^2.
/// Correlated kind: elementwise AR(serial_phi) innovations mixed through the
/// Cholesky factor of the Toeplitz cross-correlation, then scaled by 1/delta
/// (the Toeplitz diagonal and the AR stationary variance are both 1, so the
/// analytic rescale is exact).
Matrix gen_noise_vector(Index T, Index d, const NoiseSpec& noise, Rng& rng);

/// Matrix-panel analogue: E_t = L_row U_t L_col' scaled by 1/delta, with U_t
/// elementwise AR over time.
std::vector<Matrix> gen_noise_matrix(Index T, Index d1, Index d2, const NoiseSpec& noise, Rng& rng);

/// x_t = A f_t + eps_t, assembled from the pieces above. Identical spec and
/// seed give a bit-identical panel.
std::pair<VectorPanel, VectorGroundTruth> simulate_vector(const VectorDGPSpec& spec);

/// X_t = A1 F_t A2' + E_t.
std::pair<MatrixPanel, MatrixGroundTruth> simulate_matrix(const MatrixDGPSpec& spec);

}  // namespace fsl::dgp
