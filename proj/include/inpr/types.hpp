#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>

namespace inpr {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// One point per row. Row-major so that each point is a contiguous span.
using PointMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Point = std::span<const double>;

inline Point row_of(const PointMatrix& points, Eigen::Index i) {
    return {points.data() + i * points.cols(), static_cast<std::size_t>(points.cols())};
}

/// Builds an n x 1 point matrix from scalar abscissae.
inline PointMatrix points_1d(std::span<const double> xs) {
    PointMatrix out(static_cast<Eigen::Index>(xs.size()), 1);
    for (std::size_t i = 0; i < xs.size(); ++i) out(static_cast<Eigen::Index>(i), 0) = xs[i];
    return out;
}

}  // namespace inpr
