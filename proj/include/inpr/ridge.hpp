#pragma once

#include "inpr/kernels.hpp"
#include "inpr/types.hpp"

#include <memory>
#include <span>
#include <vector>

namespace inpr {

/// Observations (x_i, y_i) from one data source. source_id 0 is the target.
struct SampleSet {
    int source_id = 0;
    PointMatrix xs;
    Vector ys;

    Eigen::Index size() const noexcept { return ys.size(); }
    int dim() const noexcept { return static_cast<int>(xs.cols()); }

    /// Throws InputError/ShapeError unless len(xs) = len(ys) > 0 and all values are finite.
    void validate() const;
};

/// Non-negative per-observation loss weights, aligned with a flattened observation order.
class WeightVector {
public:
    explicit WeightVector(Vector values);
    static WeightVector ones(Eigen::Index n);

    const Vector& values() const noexcept { return values_; }
    Eigen::Index size() const noexcept { return values_.size(); }
    double operator[](Eigen::Index i) const { return values_[i]; }

private:
    Vector values_;
};

/// f(x) = sum_i coeffs_i K(design_i, x).
class FittedRegressor {
public:
    FittedRegressor(KernelSpec spec, std::shared_ptr<const PointMatrix> design, Vector coeffs, double lambda);

    const KernelSpec& spec() const noexcept { return spec_; }
    const PointMatrix& design() const noexcept { return *design_; }
    const std::shared_ptr<const PointMatrix>& shared_design() const noexcept { return design_; }
    const Vector& coeffs() const noexcept { return coeffs_; }
    double lambda() const noexcept { return lambda_; }

    double operator()(Point x) const;
    Vector predict(const PointMatrix& xs) const;

private:
    KernelSpec spec_;
    std::shared_ptr<const PointMatrix> design_;
    Vector coeffs_;
    double lambda_;
};

inline double predict(const FittedRegressor& model, Point x) { return model(x); }

/// Weighted kernel ridge regression on a fixed design.
///
/// Minimizes (1/2n) sum_i w_i (y_i - f(x_i))^2 + (lambda/2) ||f||_H^2. The
/// representer coefficients are c = W^{1/2} z with
/// (W^{1/2} K W^{1/2} + n lambda I) z = W^{1/2} y, which stays symmetric
/// positive definite when some weights are zero.
///
/// The Gram matrix is built once; the eigendecomposition used by GCV is
/// computed on first use and shared by copies of the solver.
class KernelRidge {
public:
    KernelRidge(std::shared_ptr<const PointMatrix> design, KernelSpec spec);
    KernelRidge(PointMatrix design, KernelSpec spec);

    const KernelSpec& spec() const noexcept { return spec_; }
    const GramMatrix& gram() const noexcept;
    const std::shared_ptr<const PointMatrix>& shared_design() const noexcept { return design_; }
    Eigen::Index size() const noexcept { return design_->rows(); }

    Vector coefficients(const Vector& ys, double lambda) const;
    Vector coefficients(const Vector& ys, const WeightVector& weights, double lambda) const;

    FittedRegressor fit(const Vector& ys, double lambda) const;
    FittedRegressor fit(const Vector& ys, const WeightVector& weights, double lambda) const;

    /// K c, the fitted values on the design.
    Vector design_values(const Vector& coeffs) const;

    /// n ||(I - A) y||^2 / tr(I - A)^2 with A = K (K + n lambda I)^{-1}; +inf when tr(I - A) <= 0.
    double gcv_score(const Vector& ys, double lambda) const;

    /// Grid element with the smallest GCV score; ties go to the larger lambda.
    double select_lambda(const Vector& ys, std::span<const double> grid) const;

private:
    struct Cache;
    const Cache& eigen_ready() const;

    std::shared_ptr<const PointMatrix> design_;
    KernelSpec spec_;
    std::shared_ptr<Cache> cache_;
};

FittedRegressor fit_wkrr(const PointMatrix& xs, const Vector& ys, const WeightVector& weights, double lambda,
                         const KernelSpec& spec);
FittedRegressor fit_krr(const PointMatrix& xs, const Vector& ys, double lambda, const KernelSpec& spec);

double gcv_score(const PointMatrix& xs, const Vector& ys, double lambda, const KernelSpec& spec);
double select_lambda_gcv(const PointMatrix& xs, const Vector& ys, const KernelSpec& spec,
                         std::span<const double> grid);

/// count log-spaced values from lo to hi inclusive. Default: 30 points on [1e-8, 1].
std::vector<double> log_grid(double lo = 1e-8, double hi = 1.0, int count = 30);

/// ||(W K + n lambda I) c - W y||_inf, the residual of the weighted normal equations.
double normal_equation_residual(const Matrix& gram, const Vector& weights, const Vector& ys, const Vector& coeffs,
                                double lambda);

void check_lambda(double lambda);

}  // namespace inpr
