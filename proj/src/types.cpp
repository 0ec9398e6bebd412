#include "fsl/types.hpp"

#include <cmath>

namespace fsl {

const VectorPanel& validate_panel(const VectorPanel& panel) {
    if (panel.T() < 2) {
        throw DimensionTooSmallError("vector panel needs T >= 2, got T = " + std::to_string(panel.T()));
    }
    if (panel.dim() < 1) {
        throw DimensionTooSmallError("vector panel needs d >= 1");
    }
    for (Index t = 0; t < panel.T(); ++t) {
        for (Index i = 0; i < panel.dim(); ++i) {
            if (!std::isfinite(panel.data(t, i))) throw NonFiniteError(t, i);
        }
    }
    return panel;
}

const MatrixPanel& validate_panel(const MatrixPanel& panel) {
    if (panel.T() < 2) {
        throw DimensionTooSmallError("matrix panel needs T >= 2, got T = " + std::to_string(panel.T()));
    }
    if (panel.d1() < 1 || panel.d2() < 1) {
        throw DimensionTooSmallError("matrix panel needs d1, d2 >= 1");
    }
    const Index d1 = panel.d1();
    const Index d2 = panel.d2();
    for (Index t = 0; t < panel.T(); ++t) {
        const Matrix& slab = panel.slabs[static_cast<std::size_t>(t)];
        if (slab.rows() != d1 || slab.cols() != d2) {
            throw ShapeMismatchError("slab " + std::to_string(t) + " has inconsistent dimensions");
        }
        for (Index i = 0; i < d1; ++i) {
            for (Index j = 0; j < d2; ++j) {
                if (!std::isfinite(slab(i, j))) throw NonFiniteError(t, i, j);
            }
        }
    }
    return panel;
}

MatrixPanel transpose_slabs(const MatrixPanel& panel) {
    MatrixPanel out;
    out.slabs.reserve(panel.slabs.size());
    for (const Matrix& slab : panel.slabs) out.slabs.emplace_back(slab.transpose());
    return out;
}

Vector realized_strengths(const Matrix& loading) {
    const Index d = loading.rows();
    const Index r = loading.cols();
    if (d < 2) throw DegenerateDimError("realized strengths need d >= 2 (log d = 0 at d = 1)");
    const double log_d = std::log(static_cast<double>(d));
    Vector alpha(r);
    for (Index j = 0; j < r; ++j) {
        const double norm2 = loading.col(j).squaredNorm();
        if (norm2 == 0.0) throw ZeroColumnError(j);
        alpha(j) = std::log(norm2) / log_d;
    }
    return alpha;
}

std::string to_string(StrengthMode mode) {
    switch (mode) {
        case StrengthMode::vector_mode: return "vector";
        case StrengthMode::matrix_mode1: return "matrix-mode-1";
        case StrengthMode::matrix_mode2: return "matrix-mode-2";
    }
    return "unknown";
}

}  // namespace fsl
