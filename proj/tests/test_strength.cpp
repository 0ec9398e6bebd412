#include <doctest.h>

#include <cmath>

#include "fsl/dgp.hpp"
#include "fsl/strength.hpp"
#include "oracles.hpp"

using namespace fsl;
using namespace fsl::strength;

namespace {

est::CovMatrix cov_from(const Matrix& m) { return est::CovMatrix(Matrix(0.5 * (m + m.transpose()))); }

}  // namespace

TEST_CASE("project_s: identity basis returns the covariance itself") {
    const Matrix psd = oracles::random_psd(5, 201);
    const est::CovMatrix cov = cov_from(psd);
    const SMatrix s = project_s(Matrix(Matrix::Identity(5, 5)), cov);
    CHECK(s.S == cov.S);
}

TEST_CASE("project_s: single coordinate picks the diagonal entry") {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = 9.0;
    m(1, 1) = 1.0;
    const SMatrix s = project_s(Matrix(Matrix::Identity(2, 1)), cov_from(m));
    CHECK(s.r() == 1);
    CHECK(s.S(0, 0) == 9.0);
}

TEST_CASE("project_s matches the triple-product oracle") {
    const Matrix psd = oracles::random_psd(12, 202);
    const Matrix q = oracles::random_orthonormal(12, 4, 203);
    const SMatrix s = project_s(q, cov_from(psd));
    const Matrix oracle = oracles::project_triple(q, cov_from(psd).S);
    CHECK((s.S - oracle).cwiseAbs().maxCoeff() <= 1e-12 * oracle.norm());
    CHECK_THROWS_AS(project_s(oracles::random_orthonormal(5, 2, 204), cov_from(psd)),
                    DimMismatchError);
}

TEST_CASE("vector_strengths: exact log identities") {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = 100.0;
    m(1, 1) = std::pow(100.0, 0.6);
    const StrengthReport report = vector_strengths(SMatrix(m), 100);
    CHECK(report.alpha_hat(0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(report.alpha_hat(1) == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(report.d_hat(0) == 100.0);
    CHECK(report.mode == StrengthMode::vector_mode);
    CHECK(report.warnings.empty());

    Matrix unit = Matrix::Zero(1, 1);
    unit(0, 0) = 1.0;
    for (const Index d : {2, 10, 1000}) {
        CHECK(vector_strengths(SMatrix(unit), d).alpha_hat(0) == 0.0);
    }
}

TEST_CASE("vector_strengths: alpha recomputes exactly from the report fields") {
    const Matrix psd = oracles::random_psd(6, 205) + 5.0 * Matrix::Identity(6, 6);
    const SMatrix s = project_s(oracles::random_orthonormal(6, 3, 206), cov_from(psd));
    const StrengthReport report = vector_strengths(s, 6);
    for (Index j = 0; j < 3; ++j) {
        CHECK(report.alpha_hat(j) == std::log(report.d_hat(j)) / std::log(6.0));
    }
}

TEST_CASE("vector_strengths: non-positive diagonals and degenerate dimension") {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = 1.0;
    m(1, 1) = -0.1;
    CHECK_THROWS_AS(vector_strengths(SMatrix(m), 10), NonPositiveDiagonalError);
    try {
        vector_strengths(SMatrix(m), 10);
    } catch (const NonPositiveDiagonalError& err) {
        CHECK(err.factor == 1);
    }
    m(1, 1) = 0.0;
    CHECK_THROWS_AS(vector_strengths(SMatrix(m), 10), NonPositiveDiagonalError);
    m(1, 1) = 1.0;
    CHECK_THROWS_AS(vector_strengths(SMatrix(m), 1), DegenerateDimError);
}

TEST_CASE("vector_strengths: out-of-range estimates warn but do not fail") {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = std::pow(10.0, 1.7);  // alpha = 1.7 > 1.5
    m(1, 1) = 0.5;                  // alpha < 0
    const StrengthReport report = vector_strengths(SMatrix(m), 10);
    CHECK(report.warnings.size() == 2);
}

TEST_CASE("matrix_traces: symmetric and asymmetric analytic cases") {
    Matrix s1 = Matrix::Zero(1, 1);
    Matrix s2 = Matrix::Zero(1, 1);
    s1(0, 0) = 100.0;
    s2(0, 0) = 100.0;
    const TraceSplit sym = matrix_traces(SMatrix(s1), SMatrix(s2), 1, 10, 1, 10);
    CHECK(sym.g1_hat == doctest::Approx(10.0).epsilon(1e-14));
    CHECK(sym.g2_hat == doctest::Approx(10.0).epsilon(1e-14));

    // r1 d1 = 4 r2 d2 with average trace 100: g1 = 20, g2 = 5.
    s1(0, 0) = 120.0;
    s2(0, 0) = 80.0;
    const TraceSplit skew = matrix_traces(SMatrix(s1), SMatrix(s2), 2, 16, 1, 8);
    CHECK(skew.g1_hat == doctest::Approx(20.0).epsilon(1e-14));
    CHECK(skew.g2_hat == doctest::Approx(5.0).epsilon(1e-14));

    s2(0, 0) = -1.0;
    CHECK_THROWS_AS(matrix_traces(SMatrix(s1), SMatrix(s2), 2, 16, 1, 8), NonPositiveTraceError);
}

TEST_CASE("matrix_traces: construction identities hold on random inputs") {
    for (unsigned seed = 0; seed < 10; ++seed) {
        const Matrix s1 = oracles::random_psd(3, 300 + seed) + 0.5 * Matrix::Identity(3, 3);
        const Matrix s2 = oracles::random_psd(2, 400 + seed) + 0.5 * Matrix::Identity(2, 2);
        const Index r1 = 3, d1 = 20 + seed, r2 = 2, d2 = 35;
        const TraceSplit split = matrix_traces(SMatrix(s1), SMatrix(s2), r1, d1, r2, d2);
        const double average = (split.trS1 + split.trS2) / 2.0;
        CHECK(std::abs(split.g1_hat * split.g2_hat - average) <= 1e-10 * average);
        const double lhs = split.g1_hat / static_cast<double>(r1 * d1);
        const double rhs = split.g2_hat / static_cast<double>(r2 * d2);
        CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(lhs, rhs));
    }
}

TEST_CASE("matrix_traces: ratio-consistent against a constructed identifiable truth") {
    // Exact A_k = Q_k D_k^{1/2} with tr(D_1)/(r1 d1) = tr(D_2)/(r2 d2).
    const Index d1 = 40, d2 = 80, r1 = 2, r2 = 2, T = 500;
    Vector diag1(2), diag2(2);
    diag1 << 40.0, 10.0;  // trace 50, 50/80
    diag2 << 80.0, 20.0;  // trace 100, 100/160
    const Matrix q1 = oracles::random_orthonormal(d1, r1, 501);
    const Matrix q2 = oracles::random_orthonormal(d2, r2, 502);
    const Matrix a1 = q1 * diag1.cwiseSqrt().asDiagonal();
    const Matrix a2 = q2 * diag2.cwiseSqrt().asDiagonal();

    MatrixPanel panel;
    std::mt19937 gen(503);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Index t = 0; t < T; ++t) {
        Matrix f(r1, r2);
        for (Index i = 0; i < r1; ++i) {
            for (Index j = 0; j < r2; ++j) f(i, j) = normal(gen);
        }
        panel.slabs.push_back(a1 * f * a2.transpose());
    }
    const MatrixEstimate estimate = estimate_matrix_panel(panel, r1, r2);
    CHECK(estimate.traces.g1_hat / diag1.sum() > 0.9);
    CHECK(estimate.traces.g1_hat / diag1.sum() < 1.1);
    CHECK(estimate.traces.g2_hat / diag2.sum() > 0.9);
    CHECK(estimate.traces.g2_hat / diag2.sum() < 1.1);
}

TEST_CASE("matrix_strengths: unit mode-2 normalizer reduces mode 1 to the vector rule") {
    // r2 d2 / (r1 d1) = 2/128 = 1/64 exactly; traces sum to 128 so g2 = 1.
    Matrix s1 = Matrix::Zero(2, 2);
    s1(0, 0) = 100.0;
    s1(1, 1) = 20.0;
    Matrix s2 = Matrix::Zero(1, 1);
    s2(0, 0) = 8.0;
    const ModeDims dims{2, 64, 1, 2};
    const auto [r1, r2] = matrix_strengths(SMatrix(s1), SMatrix(s2), dims);
    CHECK(r1.g_hat.has_value());
    const double log_d1 = std::log(64.0);
    CHECK(r1.alpha_hat(0) == std::log(100.0) / log_d1);
    CHECK(r1.alpha_hat(1) == std::log(20.0) / log_d1);
    CHECK(r1.mode == StrengthMode::matrix_mode1);
    CHECK(r2.mode == StrengthMode::matrix_mode2);
}

TEST_CASE("assemble_loading: analytic cases and elementwise oracle") {
    const Matrix q = oracles::random_orthonormal(7, 3, 600);
    const LoadingEstimate ones = assemble_loading(q, Vector(Vector::Ones(3)));
    CHECK(ones.A_hat == q);

    Vector four(1);
    four << 4.0;
    const LoadingEstimate scaled = assemble_loading(Matrix(Matrix::Identity(3, 1)), four);
    CHECK(scaled.A_hat(0, 0) == 2.0);
    CHECK(scaled.A_hat(1, 0) == 0.0);

    Vector d_hat(3);
    d_hat << 2.5, 0.25, 9.0;
    const LoadingEstimate est = assemble_loading(q, d_hat);
    for (Index i = 0; i < q.rows(); ++i) {
        for (Index j = 0; j < q.cols(); ++j) {
            CHECK(est.A_hat(i, j) == doctest::Approx(q(i, j) * std::sqrt(d_hat(j))).epsilon(1e-14));
        }
    }

    Vector bad(3);
    bad << 1.0, 0.0, 1.0;
    CHECK_THROWS_AS(assemble_loading(q, bad), NonPositiveError);
    CHECK_THROWS_AS(assemble_loading(q, four), DimMismatchError);
}

TEST_CASE("sign flips of the basis leave the strength diagonal unchanged exactly") {
    const Matrix psd = oracles::random_psd(10, 601) + Matrix::Identity(10, 10);
    Matrix q = oracles::random_orthonormal(10, 3, 602);
    const est::CovMatrix cov = cov_from(psd);
    const SMatrix base = project_s(q, cov);
    q.col(1) = -q.col(1);
    const SMatrix flipped = project_s(q, cov);
    for (Index j = 0; j < 3; ++j) CHECK(base.S(j, j) == flipped.S(j, j));
}

TEST_CASE("noiseless exactness: orthonormal truth and unit factor Gram") {
    const Index d = 20, r = 2, T = 40;
    Vector diag(2);
    diag << 12.0, 5.0;
    const Matrix q = oracles::random_orthonormal(d, r, 603);
    const Matrix a = q * diag.cwiseSqrt().asDiagonal();
    // Orthonormalize the factor block so (1/T) F'F = I exactly.
    const Matrix f =
        std::sqrt(static_cast<double>(T)) * oracles::random_orthonormal(T, r, 604);
    VectorPanel panel;
    panel.data = f * a.transpose();
    const SMatrix s = project_s(q, est::sample_cov_vector(panel));
    const StrengthReport report = vector_strengths(s, d);
    const Vector realized = realized_strengths(a);
    for (Index j = 0; j < r; ++j) {
        CHECK(std::abs(report.alpha_hat(j) - realized(j)) <= 1e-10);
    }
}

TEST_CASE("estimate_vector_panel: diagonal read equals the top eigenvalues") {
    dgp::VectorDGPSpec spec;
    spec.d = 40;
    spec.r = 2;
    spec.T = 80;
    spec.zeta = dgp::zeta_for_setting(dgp::Setting::I);
    spec.seed = 21;
    const auto [panel, truth] = dgp::simulate_vector(spec);
    (void)truth;
    const VectorEstimate estimate = estimate_vector_panel(panel, 2);
    CHECK(estimate.report.off_diagonal_ratio <= 1e-8);
    for (Index j = 0; j < 2; ++j) {
        CHECK(std::abs(estimate.report.d_hat(j) - estimate.top_eigenvalues(j)) <=
              1e-8 * estimate.top_eigenvalues(j));
    }
    // Assembled loading keeps the basis and scales together.
    CHECK(estimate.loading.A_hat.col(0) ==
          Matrix(estimate.loading.Q.col(0) * std::sqrt(estimate.loading.d_hat(0))));
}

TEST_CASE("estimate_matrix_panel: slab transposition swaps the mode reports bitwise") {
    dgp::MatrixDGPSpec spec;
    spec.d1 = 9;
    spec.d2 = 7;
    spec.r1 = 2;
    spec.r2 = 2;
    spec.T = 30;
    spec.zeta1 = dgp::zeta_for_setting(dgp::Setting::I);
    spec.zeta2 = dgp::zeta_for_setting(dgp::Setting::I);
    spec.seed = 23;
    const auto [panel, truth] = dgp::simulate_matrix(spec);
    (void)truth;
    for (const auto estimator :
         {MatrixEstimator::mode_pca, MatrixEstimator::iterative_projection}) {
        MatrixEstimateOptions opts;
        opts.estimator = estimator;
        const MatrixEstimate direct = estimate_matrix_panel(panel, 2, 2, opts);
        const MatrixEstimate swapped = estimate_matrix_panel(transpose_slabs(panel), 2, 2, opts);
        CHECK(direct.report1.alpha_hat == swapped.report2.alpha_hat);
        CHECK(direct.report2.alpha_hat == swapped.report1.alpha_hat);
        CHECK(direct.report1.d_hat == swapped.report2.d_hat);
        CHECK(direct.report2.d_hat == swapped.report1.d_hat);
        CHECK(*direct.report1.g_hat == *swapped.report2.g_hat);
        CHECK(*direct.report2.g_hat == *swapped.report1.g_hat);
    }
}

TEST_CASE("estimate_vector_panel demean removes a constant shift") {
    dgp::VectorDGPSpec spec;
    spec.d = 20;
    spec.r = 2;
    spec.T = 60;
    spec.zeta = dgp::zeta_for_setting(dgp::Setting::I);
    spec.seed = 29;
    const auto [panel, truth] = dgp::simulate_vector(spec);
    (void)truth;
    VectorPanel shifted;
    shifted.data = panel.data.rowwise() + Eigen::RowVectorXd::Constant(20, 100.0);
    VectorEstimateOptions opts;
    opts.demean = true;
    const VectorEstimate base = estimate_vector_panel(panel, 2, opts);
    const VectorEstimate moved = estimate_vector_panel(shifted, 2, opts);
    CHECK(base.report.alpha_hat(0) == doctest::Approx(moved.report.alpha_hat(0)).epsilon(1e-9));
    CHECK(base.report.alpha_hat(1) == doctest::Approx(moved.report.alpha_hat(1)).epsilon(1e-9));
}
