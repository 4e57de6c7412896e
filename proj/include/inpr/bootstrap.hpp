#pragma once

#include "inpr/random.hpp"
#include "inpr/ridge.hpp"
#include "inpr/shift.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace inpr {

enum class MultiplierDistribution {
    /// Density 3/4 on [0,1] and 1/12 on (1,4]: mean 1, variance 1.
    Piecewise,
    /// Every weight is 1.
    UnitConstant,
};

enum class ShiftMode { Covariate, Distribution };

/// Inverse CDF of the piecewise multiplier law: 4u/3 for u <= 3/4, else 1 + 12(u - 3/4).
double multiplier_from_uniform(double u);

WeightVector sample_multipliers(Eigen::Index count, MultiplierDistribution dist, Rng& rng);

struct EnsembleOptions {
    int replicates = 200;
    ShiftMode mode = ShiftMode::Covariate;
    std::uint64_t seed = 0;
    MultiplierDistribution multipliers = MultiplierDistribution::Piecewise;
    /// Distribution mode only: shuffle before halving.
    bool shuffle = true;
    int threads = 1;
};

/// Unit-weight base fit plus B multiplier-weighted refits on the same design and lambda.
class BootstrapEnsemble {
public:
    BootstrapEnsemble(KernelRidge solver, Vector ys, FittedRegressor base, Matrix replicate_coeffs, ShiftMode mode);

    const FittedRegressor& base() const noexcept { return base_; }
    ShiftMode mode() const noexcept { return mode_; }
    const PointMatrix& design() const noexcept { return base_.design(); }
    const KernelRidge& solver() const noexcept { return solver_; }
    /// Responses the fits were computed from (calibrated ones in distribution mode).
    const Vector& responses() const noexcept { return ys_; }
    int size() const noexcept { return static_cast<int>(coeffs_.cols()); }

    /// Coefficients of replicate b as column b.
    const Matrix& replicate_coeffs() const noexcept { return coeffs_; }
    FittedRegressor replicate(int b) const;

    /// Row i holds the B replicate values at xs_i.
    Matrix replicate_values(const PointMatrix& xs) const;
    Vector replicate_values(Point x) const;

    Vector base_design_values() const;
    /// n x B matrix of replicate values on the design.
    Matrix replicate_design_values() const;

    /// Same ensemble with the replicate columns reordered (exchangeability checks).
    BootstrapEnsemble permuted(std::span<const int> order) const;

private:
    KernelRidge solver_;
    Vector ys_;
    FittedRegressor base_;
    Matrix coeffs_;
    ShiftMode mode_;
};

/// Builds the ensemble from data. In distribution mode the split and offsets
/// are computed once (seeded by options.seed) and shared by the base fit and
/// every replicate; multipliers enter only the final weighted fit.
BootstrapEnsemble bootstrap_ensemble(const MultiSourceData& data, double lambda, const KernelSpec& spec,
                                     const EnsembleOptions& options);

/// Ensemble over an already assembled design and response vector.
BootstrapEnsemble bootstrap_on_design(const KernelRidge& solver, const Vector& ys, double lambda, ShiftMode mode,
                                      const EnsembleOptions& options);

/// Seed of the multiplier stream for replicate b.
std::uint64_t replicate_seed(std::uint64_t seed, int b) noexcept;

struct PointwiseCI {
    std::vector<double> x;
    double lower = 0.0;
    double upper = 0.0;
    double alpha = 0.05;

    bool contains(double v) const noexcept { return lower <= v && v <= upper; }
};

struct GlobalRegion {
    std::shared_ptr<const FittedRegressor> center;
    double radius = 0.0;
    double alpha = 0.05;
};

/// Inclusive order-statistic rank ceil(p * count), clamped to [1, count].
std::size_t order_statistic_rank(double p, std::size_t count);

/// (base - q, base - p) where p, q are the ranks ceil(alpha/2 B) and
/// ceil((1 - alpha/2) B) of the sorted deltas.
std::pair<double, double> percentile_interval(double base_value, std::vector<double> deltas, double alpha);

PointwiseCI pointwise_ci(const BootstrapEnsemble& ens, Point x, double alpha);

/// Pointwise intervals at many points, sharing one kernel evaluation pass.
std::vector<PointwiseCI> pointwise_cis(const BootstrapEnsemble& ens, const PointMatrix& xs, double alpha);

/// Root mean square of the values.
double empirical_norm(std::span<const double> values);
double empirical_norm(const Vector& values);

/// Rank-ceil((1 - alpha) B) order statistic of the norms.
double region_radius(std::vector<double> norms, double alpha);

/// Bootstrap radius of ||f_b - f_base||_ep over the pooled design.
GlobalRegion global_region(const BootstrapEnsemble& ens, double alpha);

/// True iff ||f - base||_ep <= radius on the design (boundary inclusive).
bool region_contains(const GlobalRegion& region, std::span<const double> f_on_design,
                     std::span<const double> base_on_design);

void check_alpha(double alpha);

}  // namespace inpr
