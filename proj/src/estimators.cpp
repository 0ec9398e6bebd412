#include "fsl/estimators.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace fsl::est {

namespace {

// (scale) * sum_t slabs[t] slabs[t]', accumulated on the lower triangle and
// mirrored, so the result is exactly symmetric.
Matrix gram_accumulate(const std::vector<Matrix>& slabs, double scale) {
    const Index rows = slabs.front().rows();
    Matrix acc = Matrix::Zero(rows, rows);
    for (const Matrix& slab : slabs) {
        acc.selfadjointView<Eigen::Lower>().rankUpdate(slab, 1.0);
    }
    Matrix full = acc.selfadjointView<Eigen::Lower>();
    full *= scale;
    return full;
}

Matrix projected_gram(const std::vector<Matrix>& slabs, const Matrix& basis, double scale) {
    const Index rows = slabs.front().rows();
    Matrix acc = Matrix::Zero(rows, rows);
    Matrix projected;
    for (const Matrix& slab : slabs) {
        projected.noalias() = slab * basis;
        acc.selfadjointView<Eigen::Lower>().rankUpdate(projected, 1.0);
    }
    Matrix full = acc.selfadjointView<Eigen::Lower>();
    full *= scale;
    return full;
}

double subspace_delta(const Matrix& a, const Matrix& b) {
    return (a * a.transpose() - b * b.transpose()).norm();
}

}  // namespace

CovMatrix::CovMatrix(Matrix s) : S(std::move(s)) {
    if (S.rows() != S.cols()) throw DimMismatchError("covariance matrix must be square");
    const double magnitude = S.cwiseAbs().maxCoeff();
    const double asymmetry = (S - S.transpose()).cwiseAbs().maxCoeff();
    if (asymmetry > 1e-10 * magnitude) {
        throw DimMismatchError("covariance matrix is asymmetric beyond tolerance");
    }
}

CovMatrix sample_cov_vector(const VectorPanel& panel) {
    const Index d = panel.dim();
    Matrix acc = Matrix::Zero(d, d);
    acc.selfadjointView<Eigen::Lower>().rankUpdate(panel.data.transpose(),
                                                   1.0 / static_cast<double>(panel.T()));
    Matrix full = acc.selfadjointView<Eigen::Lower>();
    return CovMatrix(std::move(full));
}

CovMatrix mode_cov(const MatrixPanel& panel, int mode) {
    if (mode != 1 && mode != 2) throw DimMismatchError("mode must be 1 or 2");
    if (panel.T() < 1) throw DimensionTooSmallError("mode covariance needs T >= 1");
    const double scale = 1.0 / static_cast<double>(panel.T());
    if (mode == 1) {
        return CovMatrix(gram_accumulate(panel.slabs, scale));
    }
    return CovMatrix(gram_accumulate(transpose_slabs(panel).slabs, scale));
}

PcaResult pca_loadings(const CovMatrix& cov, Index r) {
    const Index dim = cov.dim();
    if (r < 1 || r > dim) {
        throw DimMismatchError("requested " + std::to_string(r) + " components from dimension " +
                               std::to_string(dim));
    }
    const Matrix sym = 0.5 * (cov.S + cov.S.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
    if (solver.info() != Eigen::Success) {
        throw Error("eigendecomposition failed to converge");
    }

    PcaResult out;
    out.Q.resize(dim, r);
    out.eigenvalues.resize(r);
    for (Index k = 0; k < r; ++k) {
        const Index source = dim - 1 - k;  // solver sorts ascending
        out.eigenvalues(k) = solver.eigenvalues()(source);
        out.Q.col(k) = solver.eigenvectors().col(source);
        // Largest-magnitude entry positive, ties to the lowest index.
        Index pivot = 0;
        double pivot_abs = std::abs(out.Q(0, k));
        for (Index i = 1; i < dim; ++i) {
            const double a = std::abs(out.Q(i, k));
            if (a > pivot_abs) {
                pivot = i;
                pivot_abs = a;
            }
        }
        if (out.Q(pivot, k) < 0.0) out.Q.col(k) = -out.Q.col(k);
    }
    const double top = out.eigenvalues(0);
    out.rank_deficient = out.eigenvalues(r - 1) <= 1e-12 * top;
    return out;
}

ProjectionResult iterative_projection(const MatrixPanel& panel, Index r1, Index r2,
                                      const ProjectionConfig& cfg) {
    if (r1 < 1 || r1 > panel.d1() || r2 < 1 || r2 > panel.d2()) {
        throw DimMismatchError("factor counts must satisfy 1 <= r_k <= d_k");
    }
    if (cfg.max_iters < 1 || !(cfg.tol > 0.0)) {
        throw InvalidSpecError("projection config needs max_iters >= 1 and tol > 0");
    }
    const MatrixPanel transposed = transpose_slabs(panel);
    const double inv_T = 1.0 / static_cast<double>(panel.T());

    ProjectionResult res;
    res.Q1 = pca_loadings(CovMatrix(gram_accumulate(panel.slabs, inv_T)), r1).Q;
    res.Q2 = pca_loadings(CovMatrix(gram_accumulate(transposed.slabs, inv_T)), r2).Q;

    const double scale1 = 1.0 / (static_cast<double>(panel.T()) * static_cast<double>(panel.d2()));
    const double scale2 = 1.0 / (static_cast<double>(panel.T()) * static_cast<double>(panel.d1()));
    for (int iter = 1; iter <= cfg.max_iters; ++iter) {
        // Both modes refresh from the previous iterates, so slab-transposing
        // the panel exactly swaps the two sequences.
        Matrix q1_next = pca_loadings(CovMatrix(projected_gram(panel.slabs, res.Q2, scale1)), r1).Q;
        Matrix q2_next =
            pca_loadings(CovMatrix(projected_gram(transposed.slabs, res.Q1, scale2)), r2).Q;
        const double delta =
            std::max(subspace_delta(q1_next, res.Q1), subspace_delta(q2_next, res.Q2));
        res.Q1 = std::move(q1_next);
        res.Q2 = std::move(q2_next);
        res.iterations = iter;
        res.final_delta = delta;
        if (delta < cfg.tol) {
            res.converged = true;
            break;
        }
    }
    return res;
}

}  // namespace fsl::est
