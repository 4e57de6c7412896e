#include "inpr/bootstrap.hpp"

#include "inpr/error.hpp"
#include "inpr/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace inpr {

double multiplier_from_uniform(double u) {
    if (u <= 0.75) return 4.0 * u / 3.0;
    return 1.0 + 12.0 * (u - 0.75);
}

WeightVector sample_multipliers(Eigen::Index count, MultiplierDistribution dist, Rng& rng) {
    if (count < 1) throw ConfigError("multiplier count must be >= 1");
    if (dist == MultiplierDistribution::UnitConstant) return WeightVector::ones(count);
    Vector w(count);
    for (Eigen::Index i = 0; i < count; ++i) w[i] = multiplier_from_uniform(rng.uniform_pos());
    return WeightVector(std::move(w));
}

std::uint64_t replicate_seed(std::uint64_t seed, int b) noexcept {
    return derive_seed(seed, {0xb0075ULL, static_cast<std::uint64_t>(b)});
}

BootstrapEnsemble::BootstrapEnsemble(KernelRidge solver, Vector ys, FittedRegressor base, Matrix replicate_coeffs,
                                     ShiftMode mode)
    : solver_(std::move(solver)), ys_(std::move(ys)), base_(std::move(base)), coeffs_(std::move(replicate_coeffs)),
      mode_(mode) {
    if (coeffs_.cols() < 1) throw ConfigError("bootstrap ensemble needs at least one replicate");
    if (coeffs_.rows() != base_.coeffs().size()) throw ShapeError("replicate coefficients do not match design");
}

FittedRegressor BootstrapEnsemble::replicate(int b) const {
    return FittedRegressor(base_.spec(), base_.shared_design(), coeffs_.col(b), base_.lambda());
}

Matrix BootstrapEnsemble::replicate_values(const PointMatrix& xs) const {
    return cross_kernel(xs, design(), base_.spec()) * coeffs_;
}

Vector BootstrapEnsemble::replicate_values(Point x) const {
    base_.spec().check_point(x);
    PointMatrix one(1, static_cast<Eigen::Index>(x.size()));
    for (std::size_t j = 0; j < x.size(); ++j) one(0, static_cast<Eigen::Index>(j)) = x[j];
    return replicate_values(one).row(0).transpose();
}

Vector BootstrapEnsemble::base_design_values() const { return solver_.design_values(base_.coeffs()); }

Matrix BootstrapEnsemble::replicate_design_values() const { return solver_.gram().entries() * coeffs_; }

BootstrapEnsemble BootstrapEnsemble::permuted(std::span<const int> order) const {
    if (static_cast<int>(order.size()) != size()) throw ShapeError("permutation length does not match B");
    Matrix c(coeffs_.rows(), coeffs_.cols());
    for (int b = 0; b < size(); ++b) c.col(b) = coeffs_.col(order[static_cast<std::size_t>(b)]);
    return BootstrapEnsemble(solver_, ys_, base_, std::move(c), mode_);
}

BootstrapEnsemble bootstrap_on_design(const KernelRidge& solver, const Vector& ys, double lambda, ShiftMode mode,
                                      const EnsembleOptions& options) {
    if (options.replicates < 1) throw ConfigError("B must be >= 1");
    check_lambda(lambda);
    FittedRegressor base = solver.fit(ys, lambda);
    const Eigen::Index n = solver.size();
    Matrix coeffs(n, options.replicates);
    parallel_for(static_cast<std::size_t>(options.replicates), options.threads, [&](std::size_t b) {
        Rng rng(replicate_seed(options.seed, static_cast<int>(b)));
        const WeightVector w = sample_multipliers(n, options.multipliers, rng);
        coeffs.col(static_cast<Eigen::Index>(b)) = solver.coefficients(ys, w, lambda);
    });
    return BootstrapEnsemble(solver, ys, std::move(base), std::move(coeffs), mode);
}

BootstrapEnsemble bootstrap_ensemble(const MultiSourceData& data, double lambda, const KernelSpec& spec,
                                     const EnsembleOptions& options) {
    check_lambda(lambda);
    if (options.mode == ShiftMode::Covariate) {
        KernelRidge solver(data.pooled_xs(), spec);
        return bootstrap_on_design(solver, data.pooled_ys(), lambda, options.mode, options);
    }
    DistributionShiftOptions ds;
    ds.shuffle = options.shuffle;
    const auto prepared = prepare_distribution_shift(data, lambda, spec, options.seed, ds);
    KernelRidge solver(prepared.calibrated.pooled_xs(), spec);
    return bootstrap_on_design(solver, prepared.calibrated.pooled_ys(), lambda, options.mode, options);
}

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
}

std::size_t order_statistic_rank(double p, std::size_t count) {
    if (count == 0) throw ConfigError("order statistic of an empty sample");
    const double t = p * static_cast<double>(count);
    // Products like 0.025 * 200 land a few ulps off an integer.
    const double nearest = std::round(t);
    const double k = std::fabs(t - nearest) <= 1e-9 * std::max(1.0, t) ? nearest : std::ceil(t);
    return static_cast<std::size_t>(std::clamp(k, 1.0, static_cast<double>(count)));
}

std::pair<double, double> percentile_interval(double base_value, std::vector<double> deltas, double alpha) {
    check_alpha(alpha);
    if (deltas.size() < 2) throw ConfigError("percentile intervals need B >= 2");
    std::sort(deltas.begin(), deltas.end());
    const double p = deltas[order_statistic_rank(alpha / 2.0, deltas.size()) - 1];
    const double q = deltas[order_statistic_rank(1.0 - alpha / 2.0, deltas.size()) - 1];
    return {base_value - q, base_value - p};
}

std::vector<PointwiseCI> pointwise_cis(const BootstrapEnsemble& ens, const PointMatrix& xs, double alpha) {
    check_alpha(alpha);
    if (ens.size() < 2) throw ConfigError("pointwise intervals need B >= 2");
    const Matrix reps = ens.replicate_values(xs);
    const Vector base = ens.base().predict(xs);
    std::vector<PointwiseCI> out;
    out.reserve(static_cast<std::size_t>(xs.rows()));
    std::vector<double> deltas(static_cast<std::size_t>(ens.size()));
    for (Eigen::Index i = 0; i < xs.rows(); ++i) {
        for (int b = 0; b < ens.size(); ++b) deltas[static_cast<std::size_t>(b)] = reps(i, b) - base[i];
        const auto [lo, hi] = percentile_interval(base[i], deltas, alpha);
        const Point row = row_of(xs, i);
        out.push_back(PointwiseCI{std::vector<double>(row.begin(), row.end()), lo, hi, alpha});
    }
    return out;
}

PointwiseCI pointwise_ci(const BootstrapEnsemble& ens, Point x, double alpha) {
    ens.base().spec().check_point(x);
    PointMatrix one(1, static_cast<Eigen::Index>(x.size()));
    for (std::size_t j = 0; j < x.size(); ++j) one(0, static_cast<Eigen::Index>(j)) = x[j];
    return pointwise_cis(ens, one, alpha).front();
}

double empirical_norm(std::span<const double> values) {
    if (values.empty()) throw InputError("empirical norm of an empty vector");
    double acc = 0.0;
    for (double v : values) acc += v * v;
    return std::sqrt(acc / static_cast<double>(values.size()));
}

double empirical_norm(const Vector& values) {
    return empirical_norm(std::span<const double>(values.data(), static_cast<std::size_t>(values.size())));
}

double region_radius(std::vector<double> norms, double alpha) {
    check_alpha(alpha);
    if (norms.size() < 2) throw ConfigError("global regions need B >= 2");
    std::sort(norms.begin(), norms.end());
    return norms[order_statistic_rank(1.0 - alpha, norms.size()) - 1];
}

GlobalRegion global_region(const BootstrapEnsemble& ens, double alpha) {
    check_alpha(alpha);
    if (ens.size() < 2) throw ConfigError("global regions need B >= 2");
    const Vector base = ens.base_design_values();
    const Matrix reps = ens.replicate_design_values();
    std::vector<double> norms(static_cast<std::size_t>(ens.size()));
    for (int b = 0; b < ens.size(); ++b) norms[static_cast<std::size_t>(b)] = empirical_norm(Vector(reps.col(b) - base));
    return GlobalRegion{std::make_shared<const FittedRegressor>(ens.base()), region_radius(std::move(norms), alpha),
                        alpha};
}

bool region_contains(const GlobalRegion& region, std::span<const double> f_on_design,
                     std::span<const double> base_on_design) {
    if (f_on_design.size() != base_on_design.size()) throw ShapeError("design evaluations differ in length");
    std::vector<double> diff(f_on_design.size());
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = f_on_design[i] - base_on_design[i];
    return empirical_norm(diff) <= region.radius;
}

}  // namespace inpr
