#include "fsl/dgp.hpp"

#include <Eigen/Cholesky>
#include <cmath>

namespace fsl::dgp {

namespace {

constexpr double kSqrt3 = 1.7320508075688772935;

void check_zeta(const Vector& zeta, Index r, const char* label) {
    if (zeta.size() != r) {
        throw InvalidSpecError(std::string(label) + " must have length r");
    }
    for (Index j = 0; j < r; ++j) {
        if (zeta(j) < 0.0 || zeta(j) > 0.5) {
            throw InvalidSpecError(std::string(label) + " entries must lie in [0, 0.5]");
        }
        if (j > 0 && zeta(j) < zeta(j - 1)) {
            throw InvalidSpecError(std::string(label) + " must be nondecreasing");
        }
    }
}

Matrix toeplitz_cholesky(Index d, double rho) {
    Matrix sigma(d, d);
    for (Index i = 0; i < d; ++i) {
        for (Index j = 0; j < d; ++j) {
            sigma(i, j) = std::pow(rho, static_cast<double>(std::abs(i - j)));
        }
    }
    Eigen::LLT<Matrix> llt(sigma);
    if (llt.info() != Eigen::Success) {
        throw InvalidSpecError("cross-correlation matrix is not positive definite");
    }
    return llt.matrixL();
}

// Elementwise AR(serial_phi) chains with unit stationary variance, one chain
// per column; column-major draw order matches the iid noise path so the two
// coincide bit-for-bit when the correlation parameters vanish.
Matrix ar_chains(Index T, Index n, double phi, Rng& rng) {
    if (std::abs(phi) >= 1.0) throw UnstableArError(phi);
    const double innovation_scale = std::sqrt(1.0 - phi * phi);
    Matrix out(T, n);
    for (Index series = 0; series < n; ++series) {
        double value = rng.normal();  // stationary N(0,1) start
        out(0, series) = value;
        for (Index t = 1; t < T; ++t) {
            value = phi * value + innovation_scale * rng.normal();
            out(t, series) = value;
        }
    }
    return out;
}

}  // namespace

void NoiseSpec::validate() const {
    if (!(delta > 0.0)) throw InvalidSpecError("noise delta must be positive");
    if (std::abs(cross_rho) >= 1.0) throw InvalidSpecError("|cross_rho| must be < 1");
    if (std::abs(serial_phi) >= 1.0) throw InvalidSpecError("|serial_phi| must be < 1");
}

void VectorDGPSpec::validate() const {
    if (T < 2) throw InvalidSpecError("vector DGP needs T >= 2");
    if (r < 1) throw InvalidSpecError("vector DGP needs r >= 1");
    if (r >= d) throw InvalidSpecError("vector DGP needs r < d");
    check_zeta(zeta, r, "zeta");
    if (std::abs(ar_coef) >= 1.0) throw UnstableArError(ar_coef);
    noise.validate();
}

void MatrixDGPSpec::validate() const {
    if (T < 2) throw InvalidSpecError("matrix DGP needs T >= 2");
    if (r1 < 1 || r2 < 1) throw InvalidSpecError("matrix DGP needs r1, r2 >= 1");
    if (r1 >= d1 || r2 >= d2) throw InvalidSpecError("matrix DGP needs r_k < d_k");
    check_zeta(zeta1, r1, "zeta1");
    check_zeta(zeta2, r2, "zeta2");
    if (std::abs(ar_coef) >= 1.0) throw UnstableArError(ar_coef);
    noise.validate();
}

Vector zeta_for_setting(Setting setting) {
    Vector zeta(2);
    if (setting == Setting::I) {
        zeta << 0.0, 0.2;
    } else {
        zeta << 0.1, 0.2;
    }
    return zeta;
}

std::pair<Matrix, Vector> gen_loading(Index d, Index r, const Vector& zeta, Rng& rng) {
    if (d < 2) throw DegenerateDimError("loadings need d >= 2");
    if (r < 1 || r >= d) throw InvalidSpecError("loadings need 1 <= r < d");
    check_zeta(zeta, r, "zeta");
    Matrix loading(d, r);
    for (Index j = 0; j < r; ++j) {
        const double scale = std::pow(static_cast<double>(d), -zeta(j));
        for (Index i = 0; i < d; ++i) {
            loading(i, j) = rng.uniform(-kSqrt3, kSqrt3) * scale;
        }
    }
    return {loading, realized_strengths(loading)};
}

Matrix gen_factor_series(Index T, Index n_series, double ar_coef, Rng& rng) {
    if (T < 1 || n_series < 1) throw InvalidSpecError("factor series need T >= 1 and n >= 1");
    return ar_chains(T, n_series, ar_coef, rng);
}

Matrix gen_noise_vector(Index T, Index d, const NoiseSpec& noise, Rng& rng) {
    noise.validate();
    const double scale = 1.0 / noise.delta;
    if (noise.kind == NoiseKind::iid_gaussian) {
        Matrix eps(T, d);
        for (Index i = 0; i < d; ++i) {
            for (Index t = 0; t < T; ++t) eps(t, i) = rng.normal() * scale;
        }
        return eps;
    }
    const Matrix innovations = ar_chains(T, d, noise.serial_phi, rng);
    const Matrix chol = toeplitz_cholesky(d, noise.cross_rho);
    // eps_t = L u_t, i.e. row-wise E = U L'.
    return (innovations * chol.transpose()) * scale;
}

std::vector<Matrix> gen_noise_matrix(Index T, Index d1, Index d2, const NoiseSpec& noise, Rng& rng) {
    noise.validate();
    const double scale = 1.0 / noise.delta;
    std::vector<Matrix> slabs(static_cast<std::size_t>(T), Matrix(d1, d2));
    if (noise.kind == NoiseKind::iid_gaussian) {
        for (Index i = 0; i < d1; ++i) {
            for (Index j = 0; j < d2; ++j) {
                for (Index t = 0; t < T; ++t) {
                    slabs[static_cast<std::size_t>(t)](i, j) = rng.normal() * scale;
                }
            }
        }
        return slabs;
    }
    // One AR chain per (i, j) entry, consumed in the same (i, j, t) order as
    // the iid branch.
    std::vector<Matrix> serial(static_cast<std::size_t>(T), Matrix(d1, d2));
    const double innovation_scale = std::sqrt(1.0 - noise.serial_phi * noise.serial_phi);
    for (Index i = 0; i < d1; ++i) {
        for (Index j = 0; j < d2; ++j) {
            double value = rng.normal();
            serial[0](i, j) = value;
            for (Index t = 1; t < T; ++t) {
                value = noise.serial_phi * value + innovation_scale * rng.normal();
                serial[static_cast<std::size_t>(t)](i, j) = value;
            }
        }
    }
    const Matrix chol_row = toeplitz_cholesky(d1, noise.cross_rho);
    const Matrix chol_col = toeplitz_cholesky(d2, noise.cross_rho);
    for (Index t = 0; t < T; ++t) {
        auto& slab = slabs[static_cast<std::size_t>(t)];
        slab = (chol_row * serial[static_cast<std::size_t>(t)] * chol_col.transpose()) * scale;
    }
    return slabs;
}

std::pair<VectorPanel, VectorGroundTruth> simulate_vector(const VectorDGPSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    auto [loading, realized] = gen_loading(spec.d, spec.r, spec.zeta, rng);
    const Matrix factors = gen_factor_series(spec.T, spec.r, spec.ar_coef, rng);
    const Matrix noise = gen_noise_vector(spec.T, spec.d, spec.noise, rng);

    VectorPanel panel;
    panel.data = factors * loading.transpose() + noise;

    VectorGroundTruth truth;
    truth.A = std::move(loading);
    truth.F = factors;
    truth.realized_alpha = std::move(realized);
    return {std::move(panel), std::move(truth)};
}

std::pair<MatrixPanel, MatrixGroundTruth> simulate_matrix(const MatrixDGPSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    auto [loading1, realized1] = gen_loading(spec.d1, spec.r1, spec.zeta1, rng);
    auto [loading2, realized2] = gen_loading(spec.d2, spec.r2, spec.zeta2, rng);

    // Factor entry (i, j) follows chain i*r2 + j of the series matrix.
    const Matrix chains = gen_factor_series(spec.T, spec.r1 * spec.r2, spec.ar_coef, rng);
    std::vector<Matrix> factor_slabs(static_cast<std::size_t>(spec.T), Matrix(spec.r1, spec.r2));
    for (Index t = 0; t < spec.T; ++t) {
        for (Index i = 0; i < spec.r1; ++i) {
            for (Index j = 0; j < spec.r2; ++j) {
                factor_slabs[static_cast<std::size_t>(t)](i, j) = chains(t, i * spec.r2 + j);
            }
        }
    }
    std::vector<Matrix> noise = gen_noise_matrix(spec.T, spec.d1, spec.d2, spec.noise, rng);

    MatrixPanel panel;
    panel.slabs.resize(static_cast<std::size_t>(spec.T));
    for (Index t = 0; t < spec.T; ++t) {
        const auto ut = static_cast<std::size_t>(t);
        panel.slabs[ut] = loading1 * factor_slabs[ut] * loading2.transpose() + noise[ut];
    }

    MatrixGroundTruth truth;
    truth.A1 = std::move(loading1);
    truth.A2 = std::move(loading2);
    truth.F_slabs = std::move(factor_slabs);
    truth.realized_alpha1 = std::move(realized1);
    truth.realized_alpha2 = std::move(realized2);
    return {std::move(panel), std::move(truth)};
}

}  // namespace fsl::dgp
