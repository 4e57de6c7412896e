#pragma once

#include "inpr/kernels.hpp"
#include "inpr/ridge.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace inpr {

/// Target sample (index 0) followed by source samples in ascending source_id.
///
/// Flattened observation order, used for pooled fits and weight alignment:
/// all target observations first, then each source in index order, each in
/// its stored order.
class MultiSourceData {
public:
    explicit MultiSourceData(std::vector<SampleSet> sets);

    int dim() const noexcept { return dim_; }
    std::size_t set_count() const noexcept { return sets_.size(); }
    std::size_t source_count() const noexcept { return sets_.size() - 1; }
    const SampleSet& set(std::size_t m) const { return sets_.at(m); }
    const SampleSet& target() const { return sets_.front(); }
    std::span<const SampleSet> sets() const noexcept { return sets_; }
    Eigen::Index total_size() const noexcept;

    PointMatrix pooled_xs() const;
    Vector pooled_ys() const;

    /// Offset of set m in the flattened order.
    Eigen::Index offset_of(std::size_t m) const;

    friend bool operator==(const MultiSourceData& a, const MultiSourceData& b);

private:
    std::vector<SampleSet> sets_;
    int dim_ = 0;
};

struct SplitData {
    MultiSourceData first_half;
    MultiSourceData second_half;
};

/// Halves every set: the first ceil(n_m / 2) indices of each set's order go
/// to first_half. With shuffle the order is a seeded permutation (set m uses
/// its own stream); indices within each half keep their original order.
SplitData split(const MultiSourceData& data, std::uint64_t seed, bool shuffle);

/// Source-to-base mean differences delta^(m) = f^(m) - f^(base), stored as
/// pairs of fitted regressors and evaluated by difference. The base entry is
/// identically zero.
class OffsetSet {
public:
    struct Pair {
        std::shared_ptr<const FittedRegressor> source;
        std::shared_ptr<const FittedRegressor> base;
    };

    static OffsetSet zeros(std::size_t count);
    explicit OffsetSet(std::vector<std::optional<Pair>> offsets) : offsets_(std::move(offsets)) {}

    std::size_t size() const noexcept { return offsets_.size(); }
    bool is_zero(std::size_t m) const { return !offsets_.at(m).has_value(); }
    const std::optional<Pair>& pair(std::size_t m) const { return offsets_.at(m); }

    double operator()(std::size_t m, Point x) const;
    Vector evaluate(std::size_t m, const PointMatrix& xs) const;

private:
    std::vector<std::optional<Pair>> offsets_;
};

/// Pooled weighted fit over every set (unit weights in the second overload).
FittedRegressor fit_covariate_shift(const MultiSourceData& data, const WeightVector& weights, double lambda,
                                    const KernelSpec& spec);
FittedRegressor fit_covariate_shift(const MultiSourceData& data, double lambda, const KernelSpec& spec);

/// Per-set unweighted fits on first_half; offsets relative to set base_index.
OffsetSet estimate_offsets(const MultiSourceData& first_half, double lambda, const KernelSpec& spec,
                           std::size_t base_index = 0);

/// Replaces y with y - delta^(m)(x) in every set. Covariates are untouched.
MultiSourceData calibrate(const MultiSourceData& second_half, const OffsetSet& offsets);

struct DistributionShiftOptions {
    bool shuffle = true;
    /// Test hook: skip offset estimation and use zero offsets.
    bool zero_offsets = false;
};

/// Everything the two-step procedure computes before the final weighted fit.
struct CalibratedSplit {
    SplitData split;
    OffsetSet offsets;
    MultiSourceData calibrated;
};

CalibratedSplit prepare_distribution_shift(const MultiSourceData& data, double lambda, const KernelSpec& spec,
                                           std::uint64_t seed, const DistributionShiftOptions& options = {});

/// Sizes of the second halves produced by split (floor(n_m / 2) each), in flattened order.
Eigen::Index second_half_total(const MultiSourceData& data);

/// split -> estimate_offsets(first) -> calibrate(second) -> fit_covariate_shift(calibrated).
/// Weights are aligned to the flattened second-half order.
FittedRegressor fit_distribution_shift(const MultiSourceData& data, const WeightVector& weights, double lambda,
                                       const KernelSpec& spec, std::uint64_t seed,
                                       const DistributionShiftOptions& options = {});

}  // namespace inpr
