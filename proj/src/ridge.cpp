#include "inpr/ridge.hpp"

#include "inpr/error.hpp"
#include "inpr/linalg.hpp"

#include <cmath>
#include <limits>
#include <mutex>

namespace inpr {

void SampleSet::validate() const {
    if (ys.size() == 0) throw InputError("sample set " + std::to_string(source_id) + " is empty");
    if (xs.rows() != ys.size())
        throw ShapeError("sample set " + std::to_string(source_id) + " has " + std::to_string(xs.rows()) +
                         " points but " + std::to_string(ys.size()) + " responses");
    if (xs.cols() < 1) throw ShapeError("sample set points must have dimension >= 1");
    if (!xs.allFinite() || !ys.allFinite())
        throw InputError("sample set " + std::to_string(source_id) + " contains non-finite values");
}

WeightVector::WeightVector(Vector values) : values_(std::move(values)) {
    for (Eigen::Index i = 0; i < values_.size(); ++i)
        if (!(values_[i] >= 0.0) || !std::isfinite(values_[i]))
            throw ConfigError("weights must be finite and non-negative");
}

WeightVector WeightVector::ones(Eigen::Index n) { return WeightVector(Vector::Ones(n)); }

FittedRegressor::FittedRegressor(KernelSpec spec, std::shared_ptr<const PointMatrix> design, Vector coeffs,
                                 double lambda)
    : spec_(std::move(spec)), design_(std::move(design)), coeffs_(std::move(coeffs)), lambda_(lambda) {
    if (!design_ || design_->rows() != coeffs_.size())
        throw ShapeError("coefficient count does not match design size");
}

double FittedRegressor::operator()(Point x) const {
    spec_.check_point(x);
    const auto d = design_->cols();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < coeffs_.size(); ++i)
        acc += coeffs_[i] * spec_.evaluate_unchecked(design_->data() + i * d, x.data());
    return acc;
}

Vector FittedRegressor::predict(const PointMatrix& xs) const {
    return cross_kernel(xs, *design_, spec_) * coeffs_;
}

void check_lambda(double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ConfigError("lambda must be a finite positive number");
}

struct KernelRidge::Cache {
    GramMatrix gram;
    std::once_flag eigen_once;
    linalg::SymmetricEigen eigen;
};

KernelRidge::KernelRidge(std::shared_ptr<const PointMatrix> design, KernelSpec spec)
    : design_(std::move(design)), spec_(std::move(spec)), cache_(std::make_shared<Cache>()) {
    if (!design_ || design_->rows() == 0) throw InputError("kernel ridge design is empty");
    cache_->gram = gram_matrix(*design_, spec_);
}

KernelRidge::KernelRidge(PointMatrix design, KernelSpec spec)
    : KernelRidge(std::make_shared<const PointMatrix>(std::move(design)), std::move(spec)) {}

const GramMatrix& KernelRidge::gram() const noexcept { return cache_->gram; }

const KernelRidge::Cache& KernelRidge::eigen_ready() const {
    std::call_once(cache_->eigen_once, [this] { cache_->eigen = linalg::symmetric_eigen(cache_->gram.entries()); });
    return *cache_;
}

Vector KernelRidge::coefficients(const Vector& ys, double lambda) const {
    check_lambda(lambda);
    if (ys.size() != size()) throw ShapeError("response count does not match design size");
    if (!ys.allFinite()) throw InputError("responses contain non-finite values");
    const double n = static_cast<double>(size());
    return linalg::solve_spd_shifted(gram().entries(), n * lambda, ys);
}

Vector KernelRidge::coefficients(const Vector& ys, const WeightVector& weights, double lambda) const {
    check_lambda(lambda);
    if (ys.size() != size()) throw ShapeError("response count does not match design size");
    if (!ys.allFinite()) throw InputError("responses contain non-finite values");
    if (weights.size() != size()) throw ShapeError("weight count does not match design size");
    const double n = static_cast<double>(size());
    const Vector root = weights.values().array().sqrt();
    const Matrix conj = root.asDiagonal() * gram().entries() * root.asDiagonal();
    const Vector z = linalg::solve_spd_shifted(conj, n * lambda, root.cwiseProduct(ys));
    return root.cwiseProduct(z);
}

FittedRegressor KernelRidge::fit(const Vector& ys, double lambda) const {
    return FittedRegressor(spec_, design_, coefficients(ys, lambda), lambda);
}

FittedRegressor KernelRidge::fit(const Vector& ys, const WeightVector& weights, double lambda) const {
    return FittedRegressor(spec_, design_, coefficients(ys, weights, lambda), lambda);
}

Vector KernelRidge::design_values(const Vector& coeffs) const { return gram().entries() * coeffs; }

double KernelRidge::gcv_score(const Vector& ys, double lambda) const {
    check_lambda(lambda);
    if (ys.size() != size()) throw ShapeError("response count does not match design size");
    if (!ys.allFinite()) throw InputError("responses contain non-finite values");
    const auto& cache = eigen_ready();
    const Vector proj = cache.eigen.vectors.transpose() * ys;
    const double n = static_cast<double>(size());
    const double shift = n * lambda;
    double resid = 0.0;
    double trace = 0.0;
    for (Eigen::Index i = 0; i < proj.size(); ++i) {
        // Eigenvalues below zero are round-off on a PSD matrix.
        const double mu = std::max(cache.eigen.values[i], 0.0);
        const double r = shift / (mu + shift);
        resid += r * r * proj[i] * proj[i];
        trace += r;
    }
    if (!(trace > 0.0)) return std::numeric_limits<double>::infinity();
    return n * resid / (trace * trace);
}

double KernelRidge::select_lambda(const Vector& ys, std::span<const double> grid) const {
    if (grid.empty()) throw ConfigError("lambda grid is empty");
    double best_lambda = 0.0;
    double best_score = std::numeric_limits<double>::infinity();
    bool first = true;
    for (double lambda : grid) {
        const double score = gcv_score(ys, lambda);
        if (first || score < best_score || (score == best_score && lambda > best_lambda)) {
            best_score = score;
            best_lambda = lambda;
            first = false;
        }
    }
    return best_lambda;
}

FittedRegressor fit_wkrr(const PointMatrix& xs, const Vector& ys, const WeightVector& weights, double lambda,
                         const KernelSpec& spec) {
    check_lambda(lambda);
    return KernelRidge(xs, spec).fit(ys, weights, lambda);
}

FittedRegressor fit_krr(const PointMatrix& xs, const Vector& ys, double lambda, const KernelSpec& spec) {
    check_lambda(lambda);
    return KernelRidge(xs, spec).fit(ys, lambda);
}

double gcv_score(const PointMatrix& xs, const Vector& ys, double lambda, const KernelSpec& spec) {
    return KernelRidge(xs, spec).gcv_score(ys, lambda);
}

double select_lambda_gcv(const PointMatrix& xs, const Vector& ys, const KernelSpec& spec,
                         std::span<const double> grid) {
    if (grid.empty()) throw ConfigError("lambda grid is empty");
    return KernelRidge(xs, spec).select_lambda(ys, grid);
}

std::vector<double> log_grid(double lo, double hi, int count) {
    if (!(lo > 0.0) || !(hi >= lo) || count < 1) throw ConfigError("invalid log grid bounds");
    std::vector<double> out(static_cast<std::size_t>(count));
    if (count == 1) {
        out[0] = lo;
        return out;
    }
    const double a = std::log10(lo);
    const double b = std::log10(hi);
    for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = std::pow(10.0, a + (b - a) * i / (count - 1));
    out.front() = lo;
    out.back() = hi;
    return out;
}

double normal_equation_residual(const Matrix& gram, const Vector& weights, const Vector& ys, const Vector& coeffs,
                                double lambda) {
    const double n = static_cast<double>(ys.size());
    const Vector lhs = weights.asDiagonal() * (gram * coeffs) + n * lambda * coeffs;
    return (lhs - weights.cwiseProduct(ys)).lpNorm<Eigen::Infinity>();
}

}  // namespace inpr
