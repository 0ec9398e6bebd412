#include <doctest.h>

#include <cmath>

#include "fsl/dgp.hpp"
#include "fsl/strength.hpp"
#include "oracles.hpp"

using namespace fsl;
using namespace fsl::dgp;

namespace {

NoiseSpec iid_noise(double delta) {
    NoiseSpec noise;
    noise.kind = NoiseKind::iid_gaussian;
    noise.cross_rho = 0.0;
    noise.serial_phi = 0.0;
    noise.delta = delta;
    return noise;
}

}  // namespace

TEST_CASE("setting presets map to the documented exponents") {
    const Vector z1 = zeta_for_setting(Setting::I);
    CHECK(z1(0) == 0.0);
    CHECK(z1(1) == 0.2);
    const Vector z2 = zeta_for_setting(Setting::II);
    CHECK(z2(0) == 0.1);
    CHECK(z2(1) == 0.2);
    // alpha_j = 1 - 2 zeta_j targets.
    CHECK(1.0 - 2.0 * z1(1) == doctest::Approx(0.6));
    CHECK(1.0 - 2.0 * z2(0) == doctest::Approx(0.8));
}

TEST_CASE("gen_loading matches an independent column-norm oracle") {
    Rng rng(42);
    Vector zeta(2);
    zeta << 0.0, 0.25;
    const auto [loading, realized] = gen_loading(50, 2, zeta, rng);
    REQUIRE(loading.rows() == 50);
    REQUIRE(loading.cols() == 2);
    const double log_d = std::log(50.0);
    for (Index j = 0; j < 2; ++j) {
        double norm2 = 0.0;
        for (Index i = 0; i < 50; ++i) norm2 += loading(i, j) * loading(i, j);
        CHECK(realized(j) == doctest::Approx(std::log(norm2) / log_d).epsilon(1e-12));
    }
}

TEST_CASE("gen_loading entries stay inside the uniform support times the scale") {
    Rng rng(3);
    Vector zeta(2);
    zeta << 0.0, 0.5;
    const auto [loading, realized] = gen_loading(40, 2, zeta, rng);
    (void)realized;
    const double bound0 = std::sqrt(3.0);
    const double bound1 = std::sqrt(3.0) * std::pow(40.0, -0.5);
    CHECK(loading.col(0).cwiseAbs().maxCoeff() <= bound0);
    CHECK(loading.col(1).cwiseAbs().maxCoeff() <= bound1);
}

TEST_CASE("gen_loading realized strengths concentrate on 1 - 2 zeta") {
    Vector zeta(2);
    zeta << 0.0, 0.2;
    const Vector target = Vector::Ones(2) - 2.0 * zeta;
    int hits0 = 0;
    int hits1 = 0;
    const int seeds = 500;
    for (int s = 0; s < seeds; ++s) {
        Rng rng(static_cast<std::uint64_t>(s) + 1000);
        const auto [loading, realized] = gen_loading(200, 2, zeta, rng);
        (void)loading;
        if (std::abs(realized(0) - target(0)) <= 0.05) ++hits0;
        if (std::abs(realized(1) - target(1)) <= 0.05) ++hits1;
    }
    CHECK(hits0 >= 475);
    CHECK(hits1 >= 475);
}

TEST_CASE("gen_factor_series shape and degenerate AR") {
    Rng rng(99);
    const Matrix series = gen_factor_series(5, 3, 0.0, rng);
    CHECK(series.rows() == 5);
    CHECK(series.cols() == 3);

    // With phi = 0 the chain falls through to the raw normal draws.
    Rng replay(99);
    for (Index j = 0; j < 3; ++j) {
        for (Index t = 0; t < 5; ++t) CHECK(series(t, j) == replay.normal());
    }
}

TEST_CASE("gen_factor_series long-sample moments match the AR(1) law") {
    const Index T = 10000;
    const double phi = 0.8;
    Rng rng(2024);
    const Matrix series = gen_factor_series(T, 1, phi, rng);
    const double mean = series.col(0).mean();
    const double var = (series.col(0).array() - mean).square().sum() / static_cast<double>(T - 1);
    const double var_band = 3.0 * std::sqrt(2.0 / T) * (1.0 + phi * phi) / (1.0 - phi * phi);
    CHECK(std::abs(var - 1.0) <= var_band);

    double lag1 = 0.0;
    for (Index t = 0; t + 1 < T; ++t) lag1 += (series(t, 0) - mean) * (series(t + 1, 0) - mean);
    lag1 /= static_cast<double>(T - 1) * var;
    CHECK(std::abs(lag1 - phi) <= 0.05);
}

TEST_CASE("gen_factor_series rejects unstable AR coefficients") {
    Rng rng(1);
    CHECK_THROWS_AS(gen_factor_series(10, 1, 1.0, rng), UnstableArError);
    CHECK_THROWS_AS(gen_factor_series(10, 1, -1.2, rng), UnstableArError);
}

TEST_CASE("gen_noise_vector: iid entries carry variance 1/delta^2") {
    Rng rng(7);
    const Matrix noise = gen_noise_vector(20000, 10, iid_noise(2.0), rng);
    const double sample_var = noise.array().square().sum() / static_cast<double>(noise.size());
    CHECK(sample_var == doctest::Approx(0.25).epsilon(0.02));
}

TEST_CASE("gen_noise_vector: correlated kind keeps the average variance at 1/delta^2") {
    NoiseSpec noise;
    noise.kind = NoiseKind::correlated;
    noise.cross_rho = 0.2;
    noise.serial_phi = 0.2;
    noise.delta = 2.0;
    Rng rng(8);
    const Matrix eps = gen_noise_vector(20000, 10, noise, rng);
    double avg_var = 0.0;
    for (Index i = 0; i < 10; ++i) {
        avg_var += eps.col(i).array().square().sum() / static_cast<double>(eps.rows());
    }
    avg_var /= 10.0;
    CHECK(std::abs(avg_var - 0.25) <= 0.05 * 0.25);
}

TEST_CASE("gen_noise_vector: zero correlation parameters reduce to the iid path bit-for-bit") {
    NoiseSpec correlated;
    correlated.kind = NoiseKind::correlated;
    correlated.cross_rho = 0.0;
    correlated.serial_phi = 0.0;
    correlated.delta = 2.5;
    Rng a(55);
    Rng b(55);
    const Matrix lhs = gen_noise_vector(30, 6, correlated, a);
    const Matrix rhs = gen_noise_vector(30, 6, iid_noise(2.5), b);
    CHECK(lhs == rhs);
}

TEST_CASE("gen_noise_matrix: zero correlation parameters reduce to the iid path bit-for-bit") {
    NoiseSpec correlated;
    correlated.kind = NoiseKind::correlated;
    correlated.cross_rho = 0.0;
    correlated.serial_phi = 0.0;
    correlated.delta = 2.0;
    Rng a(56);
    Rng b(56);
    const auto lhs = gen_noise_matrix(12, 3, 4, correlated, a);
    const auto rhs = gen_noise_matrix(12, 3, 4, iid_noise(2.0), b);
    REQUIRE(lhs.size() == rhs.size());
    for (std::size_t t = 0; t < lhs.size(); ++t) CHECK(lhs[t] == rhs[t]);
}

TEST_CASE("gen_noise_matrix: correlated kind keeps the average variance at 1/delta^2") {
    NoiseSpec noise;
    noise.kind = NoiseKind::correlated;
    noise.cross_rho = 0.2;
    noise.serial_phi = 0.2;
    noise.delta = 2.0;
    Rng rng(9);
    const auto slabs = gen_noise_matrix(20000, 3, 4, noise, rng);
    double avg_var = 0.0;
    for (Index i = 0; i < 3; ++i) {
        for (Index j = 0; j < 4; ++j) {
            double ss = 0.0;
            for (const Matrix& slab : slabs) ss += slab(i, j) * slab(i, j);
            avg_var += ss / static_cast<double>(slabs.size());
        }
    }
    avg_var /= 12.0;
    CHECK(std::abs(avg_var - 0.25) <= 0.05 * 0.25);
}

TEST_CASE("simulate_vector is bit-deterministic in the seed") {
    VectorDGPSpec spec;
    spec.d = 30;
    spec.r = 2;
    spec.T = 40;
    spec.zeta = zeta_for_setting(Setting::I);
    spec.seed = 77;
    const auto [p1, t1] = simulate_vector(spec);
    const auto [p2, t2] = simulate_vector(spec);
    CHECK(p1.data == p2.data);
    CHECK(t1.A == t2.A);
    CHECK(t1.F == t2.F);
    CHECK(t1.realized_alpha == t2.realized_alpha);

    spec.seed = 78;
    const auto [p3, t3] = simulate_vector(spec);
    (void)t3;
    CHECK(p1.data != p3.data);
}

TEST_CASE("simulate_vector: near-noiseless pipeline tracks the realized strengths") {
    // With delta = 1e9 the noise is negligible; the remaining gap comes from
    // the factor sample Gram, about 2e-2 at T = 2000 for AR(0.8) factors.
    VectorDGPSpec spec;
    spec.d = 100;
    spec.r = 2;
    spec.T = 2000;
    spec.zeta = zeta_for_setting(Setting::I);
    spec.noise = iid_noise(1e9);
    spec.seed = 7;
    const auto [panel, truth] = simulate_vector(spec);
    const auto estimate = strength::estimate_vector_panel(panel, 2);
    CHECK(std::abs(estimate.report.alpha_hat(0) - truth.realized_alpha(0)) < 0.03);
    CHECK(std::abs(estimate.report.alpha_hat(1) - truth.realized_alpha(1)) < 0.03);
}

TEST_CASE("simulate_matrix: rank-(1,1) noiseless slabs are rank one") {
    MatrixDGPSpec spec;
    spec.d1 = 6;
    spec.d2 = 5;
    spec.r1 = 1;
    spec.r2 = 1;
    spec.T = 10;
    spec.zeta1 = Vector::Zero(1);
    spec.zeta2 = Vector::Zero(1);
    spec.noise = iid_noise(1e12);
    spec.seed = 4;
    const auto [panel, truth] = simulate_matrix(spec);
    (void)truth;
    for (const Matrix& slab : panel.slabs) {
        Eigen::JacobiSVD<Matrix> svd(slab);
        CHECK(svd.singularValues()(1) <= 1e-9 * svd.singularValues()(0));
    }
}

TEST_CASE("simulate_matrix: panel equals loading-factor-noise assembly exactly") {
    MatrixDGPSpec spec;
    spec.d1 = 25;
    spec.d2 = 25;
    spec.r1 = 2;
    spec.r2 = 2;
    spec.T = 50;
    spec.zeta1 = zeta_for_setting(Setting::I);
    spec.zeta2 = zeta_for_setting(Setting::I);
    spec.seed = 11;
    const auto [panel, truth] = simulate_matrix(spec);

    // Replay the generator stream to recover the noise slabs independently.
    Rng rng(spec.seed);
    const auto l1 = gen_loading(spec.d1, spec.r1, spec.zeta1, rng);
    const auto l2 = gen_loading(spec.d2, spec.r2, spec.zeta2, rng);
    const Matrix chains = gen_factor_series(spec.T, spec.r1 * spec.r2, spec.ar_coef, rng);
    (void)chains;
    const auto noise = gen_noise_matrix(spec.T, spec.d1, spec.d2, spec.noise, rng);
    CHECK(l1.first == truth.A1);
    CHECK(l2.first == truth.A2);

    double residual = 0.0;
    double scale = 0.0;
    for (Index t = 0; t < spec.T; ++t) {
        const auto ut = static_cast<std::size_t>(t);
        const Matrix rebuilt =
            truth.A1 * truth.F_slabs[ut] * truth.A2.transpose() + noise[ut];
        CHECK(rebuilt == panel.slabs[ut]);
        residual += (panel.slabs[ut] - truth.A1 * truth.F_slabs[ut] * truth.A2.transpose() -
                     noise[ut])
                        .squaredNorm();
        scale += panel.slabs[ut].squaredNorm();
    }
    CHECK(std::sqrt(residual) <= 1e-12 * std::sqrt(scale));
}

TEST_CASE("spec validation rejects malformed inputs") {
    VectorDGPSpec spec;
    spec.d = 10;
    spec.r = 2;
    spec.T = 20;
    spec.zeta = Vector::Zero(2);

    VectorDGPSpec bad = spec;
    bad.zeta(1) = 0.7;  // outside [0, 0.5]
    CHECK_THROWS_AS(simulate_vector(bad), InvalidSpecError);

    bad = spec;
    bad.zeta(0) = 0.3;
    bad.zeta(1) = 0.1;  // decreasing
    CHECK_THROWS_AS(simulate_vector(bad), InvalidSpecError);

    bad = spec;
    bad.r = 10;  // r >= d
    bad.zeta = Vector::Zero(10);
    CHECK_THROWS_AS(simulate_vector(bad), InvalidSpecError);

    bad = spec;
    bad.noise.delta = 0.0;
    CHECK_THROWS_AS(simulate_vector(bad), InvalidSpecError);
}

TEST_CASE("noise spec validation rejects out-of-range correlation parameters") {
    NoiseSpec noise;
    noise.cross_rho = 1.0;
    CHECK_THROWS_AS(noise.validate(), InvalidSpecError);
    noise.cross_rho = 0.2;
    noise.serial_phi = -1.0;
    CHECK_THROWS_AS(noise.validate(), InvalidSpecError);
    noise.serial_phi = 0.2;
    CHECK_NOTHROW(noise.validate());
}
