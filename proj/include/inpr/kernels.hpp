#pragma once

#include "inpr/types.hpp"

#include <string>
#include <variant>

namespace inpr {

/// Tensor product of order-`order` periodic Sobolev kernels on [0,1]^dim.
struct PeriodicSobolev {
    int order = 2;
    int dim = 1;
};

/// R(x, x') = exp(-(|x - x'| / scale)^exponent) on R^dim, Euclidean distance.
struct Exponential {
    double scale = 1.0;
    double exponent = 1.0;
    int dim = 1;
};

/// Validated reproducing-kernel description.
class KernelSpec {
public:
    using Variant = std::variant<PeriodicSobolev, Exponential>;

    static KernelSpec periodic_sobolev(int order, int dim = 1);
    static KernelSpec exponential(double scale, double exponent, int dim = 1);

    int dim() const noexcept;
    const Variant& variant() const noexcept { return variant_; }
    bool is_periodic_sobolev() const noexcept { return std::holds_alternative<PeriodicSobolev>(variant_); }

    /// Evaluates K(a, b) after checking shapes and the input domain.
    double operator()(Point a, Point b) const;

    /// Throws ShapeError/DomainError if the point is not admissible for this kernel.
    void check_point(Point p) const;
    void check_points(const PointMatrix& points) const;

    /// Evaluation without validation; callers must have checked both points.
    double evaluate_unchecked(const double* a, const double* b) const noexcept;

    /// Short label such as "sobolev2(d=1)" or "exp(scale=0.5,exponent=1,d=2)".
    std::string describe() const;

    friend bool operator==(const KernelSpec& a, const KernelSpec& b);

private:
    explicit KernelSpec(Variant v) : variant_(v) {}
    Variant variant_;
};

/// 1 + (-1)^(order-1) B_{2 order}({s - t}) / (2 order)!, i.e. the Fourier series
/// 1 + sum_{nu>=1} 2 cos(2 pi nu (s - t)) / (2 pi nu)^(2 order). Orders 1..3.
double periodic_sobolev_1d(double s, double t, int order);

/// Product of periodic_sobolev_1d over coordinates.
double tensor_kernel(Point x, Point x2, const KernelSpec& spec);

double exponential_kernel(Point x, Point x2, const KernelSpec& spec);

/// Symmetric kernel matrix on a design.
class GramMatrix {
public:
    GramMatrix() = default;
    explicit GramMatrix(Matrix entries) : entries_(std::move(entries)) {}

    const Matrix& entries() const noexcept { return entries_; }
    Eigen::Index point_count() const noexcept { return entries_.rows(); }
    double operator()(Eigen::Index i, Eigen::Index j) const { return entries_(i, j); }

private:
    Matrix entries_;
};

GramMatrix gram_matrix(const PointMatrix& points, const KernelSpec& spec);

/// Matrix C with C(i, j) = K(rows_i, cols_j).
Matrix cross_kernel(const PointMatrix& rows, const PointMatrix& cols, const KernelSpec& spec);

}  // namespace inpr
