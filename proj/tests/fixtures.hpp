#ifndef FSL_TEST_FIXTURES_HPP
#define FSL_TEST_FIXTURES_HPP

#include "fsl/operator.hpp"
#include "fsl/space.hpp"

namespace fsl::test {

/// 1D periodic grid, N = 64, spacing 1/64 (total mass 1).
inline const MetricMeasureSpace& grid1d() {
    static const MetricMeasureSpace s = build_grid_space(1, 64, 1.0 / 64.0);
    return s;
}

inline const SelfAdjointOperator& laplace1d() {
    static const SelfAdjointOperator op = build_laplacian(grid1d());
    return op;
}

/// 2D periodic grid, 16 x 16, unit spacing.
inline const MetricMeasureSpace& grid2d() {
    static const MetricMeasureSpace s = build_grid_space(2, 16, 1.0);
    return s;
}

inline const SelfAdjointOperator& laplace2d() {
    static const SelfAdjointOperator op = build_laplacian(grid2d());
    return op;
}

} // namespace fsl::test

#endif
