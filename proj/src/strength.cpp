#include "fsl/strength.hpp"

#include <cmath>

namespace fsl::strength {

namespace {

double off_diagonal_ratio(const Matrix& s) {
    const double total = s.norm();
    if (total == 0.0) return 0.0;
    return (s - Matrix(s.diagonal().asDiagonal())).norm() / total;
}

void flag_suspicious(StrengthReport& report) {
    for (Index j = 0; j < report.alpha_hat.size(); ++j) {
        const double a = report.alpha_hat(j);
        if (a > 1.5 || a < 0.0) {
            report.warnings.push_back("alpha_hat[" + std::to_string(j) + "] = " +
                                      std::to_string(a) + " outside the plausible range [0, 1.5]");
        }
    }
}

StrengthReport mode_report(const SMatrix& s, Index dim, Index mode, double own_g, double other_g) {
    if (dim < 2) throw DegenerateDimError("strengths need dimension >= 2");
    const double log_dim = std::log(static_cast<double>(dim));
    StrengthReport report;
    report.mode = mode == 1 ? StrengthMode::matrix_mode1 : StrengthMode::matrix_mode2;
    report.dim = dim;
    report.g_hat = own_g;
    report.off_diagonal_ratio = off_diagonal_ratio(s.S);
    report.d_hat.resize(s.r());
    report.alpha_hat.resize(s.r());
    for (Index j = 0; j < s.r(); ++j) {
        const double diag = s.S(j, j);
        if (diag <= 0.0) throw NonPositiveDiagonalError(j, diag);
        report.d_hat(j) = diag / other_g;
        report.alpha_hat(j) = std::log(report.d_hat(j)) / log_dim;
    }
    flag_suspicious(report);
    return report;
}

}  // namespace

SMatrix::SMatrix(Matrix s) : S(std::move(s)) {
    if (S.rows() != S.cols()) throw DimMismatchError("S matrix must be square");
    const double magnitude = S.cwiseAbs().maxCoeff();
    if ((S - S.transpose()).cwiseAbs().maxCoeff() > 1e-10 * magnitude) {
        throw DimMismatchError("S matrix is asymmetric beyond tolerance");
    }
}

SMatrix project_s(const Matrix& Q, const est::CovMatrix& cov) {
    if (Q.rows() != cov.dim()) {
        throw DimMismatchError("basis has " + std::to_string(Q.rows()) + " rows, covariance is " +
                               std::to_string(cov.dim()) + " x " + std::to_string(cov.dim()));
    }
    Matrix s = Q.transpose() * cov.S * Q;
    s = 0.5 * (s + s.transpose()).eval();
    return SMatrix(std::move(s));
}

StrengthReport vector_strengths(const SMatrix& s, Index d) {
    if (d < 2) throw DegenerateDimError("vector strengths need d >= 2");
    const double log_d = std::log(static_cast<double>(d));
    StrengthReport report;
    report.mode = StrengthMode::vector_mode;
    report.dim = d;
    report.off_diagonal_ratio = off_diagonal_ratio(s.S);
    report.d_hat.resize(s.r());
    report.alpha_hat.resize(s.r());
    for (Index j = 0; j < s.r(); ++j) {
        const double diag = s.S(j, j);
        if (diag <= 0.0) throw NonPositiveDiagonalError(j, diag);
        report.d_hat(j) = diag;
        report.alpha_hat(j) = std::log(diag) / log_d;
    }
    flag_suspicious(report);
    return report;
}

TraceSplit matrix_traces(const SMatrix& s1, const SMatrix& s2, Index r1, Index d1, Index r2,
                         Index d2) {
    TraceSplit split;
    split.trS1 = s1.S.trace();
    split.trS2 = s2.S.trace();
    if (split.trS1 <= 0.0) throw NonPositiveTraceError("tr(S1) is non-positive");
    if (split.trS2 <= 0.0) throw NonPositiveTraceError("tr(S2) is non-positive");
    const double average = (split.trS1 + split.trS2) / 2.0;
    const double size1 = static_cast<double>(r1 * d1);
    const double size2 = static_cast<double>(r2 * d2);
    split.g1_hat = std::sqrt(average * (size1 / size2));
    split.g2_hat = std::sqrt(average * (size2 / size1));
    return split;
}

std::pair<StrengthReport, StrengthReport> matrix_strengths(const SMatrix& s1, const SMatrix& s2,
                                                           const ModeDims& dims) {
    const TraceSplit split = matrix_traces(s1, s2, dims.r1, dims.d1, dims.r2, dims.d2);
    StrengthReport report1 = mode_report(s1, dims.d1, 1, split.g1_hat, split.g2_hat);
    StrengthReport report2 = mode_report(s2, dims.d2, 2, split.g2_hat, split.g1_hat);
    return {std::move(report1), std::move(report2)};
}

LoadingEstimate assemble_loading(const Matrix& Q, const Vector& d_hat) {
    if (Q.cols() != d_hat.size()) {
        throw DimMismatchError("basis columns and scale count differ");
    }
    LoadingEstimate estimate;
    estimate.Q = Q;
    estimate.d_hat = d_hat;
    estimate.A_hat.resize(Q.rows(), Q.cols());
    for (Index j = 0; j < Q.cols(); ++j) {
        if (!(d_hat(j) > 0.0)) {
            throw NonPositiveError("scale " + std::to_string(j) + " is not positive");
        }
        estimate.A_hat.col(j) = Q.col(j) * std::sqrt(d_hat(j));
    }
    return estimate;
}

VectorEstimate estimate_vector_panel(const VectorPanel& panel, Index r,
                                     const VectorEstimateOptions& opts) {
    validate_panel(panel);
    est::CovMatrix cov = [&] {
        if (!opts.demean) return est::sample_cov_vector(panel);
        VectorPanel centered;
        centered.data = panel.data.rowwise() - panel.data.colwise().mean();
        return est::sample_cov_vector(centered);
    }();
    const est::PcaResult pca = est::pca_loadings(cov, r);
    SMatrix s = project_s(pca.Q, cov);
    StrengthReport report = vector_strengths(s, panel.dim());
    if (pca.rank_deficient) {
        report.warnings.push_back("covariance is rank deficient at the requested factor count");
    }
    VectorEstimate out;
    out.report = std::move(report);
    out.loading = assemble_loading(pca.Q, out.report.d_hat);
    out.s_matrix = std::move(s.S);
    out.top_eigenvalues = pca.eigenvalues;
    return out;
}

MatrixEstimate estimate_matrix_panel(const MatrixPanel& panel, Index r1, Index r2,
                                     const MatrixEstimateOptions& opts) {
    validate_panel(panel);
    const MatrixPanel* source = &panel;
    MatrixPanel centered;
    if (opts.demean) {
        Matrix mean = Matrix::Zero(panel.d1(), panel.d2());
        for (const Matrix& slab : panel.slabs) mean += slab;
        mean *= 1.0 / static_cast<double>(panel.T());
        centered.slabs.reserve(panel.slabs.size());
        for (const Matrix& slab : panel.slabs) centered.slabs.emplace_back(slab - mean);
        source = &centered;
    }

    MatrixEstimate out;
    Matrix q1, q2;
    if (opts.estimator == MatrixEstimator::iterative_projection) {
        est::ProjectionResult proj = est::iterative_projection(*source, r1, r2, opts.projection);
        q1 = std::move(proj.Q1);
        q2 = std::move(proj.Q2);
        out.iterations = proj.iterations;
        out.final_delta = proj.final_delta;
        out.converged = proj.converged;
    } else {
        q1 = est::pca_loadings(est::mode_cov(*source, 1), r1).Q;
        q2 = est::pca_loadings(est::mode_cov(*source, 2), r2).Q;
    }

    const SMatrix s1 = project_s(q1, est::mode_cov(*source, 1));
    const SMatrix s2 = project_s(q2, est::mode_cov(*source, 2));
    for (Index j = 0; j < s1.r(); ++j) {
        if (s1.S(j, j) <= 0.0) throw NonPositiveDiagonalError(j, s1.S(j, j));
    }
    for (Index j = 0; j < s2.r(); ++j) {
        if (s2.S(j, j) <= 0.0) throw NonPositiveDiagonalError(j, s2.S(j, j));
    }
    const ModeDims dims{r1, panel.d1(), r2, panel.d2()};
    out.traces = matrix_traces(s1, s2, dims.r1, dims.d1, dims.r2, dims.d2);
    auto reports = matrix_strengths(s1, s2, dims);
    out.report1 = std::move(reports.first);
    out.report2 = std::move(reports.second);
    if (!out.converged) {
        const std::string note = "iterative projection stopped before convergence (delta = " +
                                 std::to_string(out.final_delta) + ")";
        out.report1.warnings.push_back(note);
        out.report2.warnings.push_back(note);
    }
    out.loading1 = assemble_loading(q1, out.report1.d_hat);
    out.loading2 = assemble_loading(q2, out.report2.d_hat);
    return out;
}

}  // namespace fsl::strength
