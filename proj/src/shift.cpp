#include "inpr/shift.hpp"

#include "inpr/error.hpp"
#include "inpr/random.hpp"

#include <algorithm>
#include <numeric>

namespace inpr {

MultiSourceData::MultiSourceData(std::vector<SampleSet> sets) : sets_(std::move(sets)) {
    if (sets_.empty()) throw InputError("multi-source data needs a target set");
    if (sets_.front().source_id != 0) throw InputError("first set must be the target (source_id 0)");
    dim_ = sets_.front().dim();
    for (std::size_t m = 0; m < sets_.size(); ++m) {
        const auto& s = sets_[m];
        s.validate();
        if (s.dim() != dim_) throw ShapeError("sample sets disagree on dimension");
        if (m > 0 && s.source_id <= sets_[m - 1].source_id)
            throw InputError("source ids must be strictly increasing");
    }
}

Eigen::Index MultiSourceData::total_size() const noexcept {
    Eigen::Index n = 0;
    for (const auto& s : sets_) n += s.size();
    return n;
}

Eigen::Index MultiSourceData::offset_of(std::size_t m) const {
    Eigen::Index off = 0;
    for (std::size_t k = 0; k < m; ++k) off += sets_.at(k).size();
    return off;
}

PointMatrix MultiSourceData::pooled_xs() const {
    PointMatrix out(total_size(), dim_);
    Eigen::Index row = 0;
    for (const auto& s : sets_) {
        out.middleRows(row, s.size()) = s.xs;
        row += s.size();
    }
    return out;
}

Vector MultiSourceData::pooled_ys() const {
    Vector out(total_size());
    Eigen::Index row = 0;
    for (const auto& s : sets_) {
        out.segment(row, s.size()) = s.ys;
        row += s.size();
    }
    return out;
}

bool operator==(const MultiSourceData& a, const MultiSourceData& b) {
    if (a.sets_.size() != b.sets_.size()) return false;
    for (std::size_t m = 0; m < a.sets_.size(); ++m) {
        const auto& x = a.sets_[m];
        const auto& y = b.sets_[m];
        if (x.source_id != y.source_id || x.xs.rows() != y.xs.rows() || x.xs.cols() != y.xs.cols()) return false;
        if (x.xs != y.xs || x.ys != y.ys) return false;
    }
    return true;
}

namespace {

SampleSet take_rows(const SampleSet& s, const std::vector<Eigen::Index>& idx) {
    SampleSet out;
    out.source_id = s.source_id;
    out.xs.resize(static_cast<Eigen::Index>(idx.size()), s.xs.cols());
    out.ys.resize(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) {
        out.xs.row(static_cast<Eigen::Index>(k)) = s.xs.row(idx[k]);
        out.ys[static_cast<Eigen::Index>(k)] = s.ys[idx[k]];
    }
    return out;
}

}  // namespace

SplitData split(const MultiSourceData& data, std::uint64_t seed, bool shuffle) {
    std::vector<SampleSet> first;
    std::vector<SampleSet> second;
    for (std::size_t m = 0; m < data.set_count(); ++m) {
        const auto& s = data.set(m);
        const Eigen::Index n = s.size();
        if (n < 2)
            throw InputError("set " + std::to_string(s.source_id) + " has fewer than 2 observations; cannot split");
        std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
        std::iota(order.begin(), order.end(), Eigen::Index{0});
        if (shuffle) {
            Rng rng(derive_seed(seed, {0x5b117ULL, static_cast<std::uint64_t>(m)}));
            for (std::size_t i = order.size() - 1; i > 0; --i)
                std::swap(order[i], order[static_cast<std::size_t>(rng.below(i + 1))]);
        }
        const auto cut = static_cast<std::ptrdiff_t>((n + 1) / 2);
        std::vector<Eigen::Index> a(order.begin(), order.begin() + cut);
        std::vector<Eigen::Index> b(order.begin() + cut, order.end());
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        first.push_back(take_rows(s, a));
        second.push_back(take_rows(s, b));
    }
    return SplitData{MultiSourceData(std::move(first)), MultiSourceData(std::move(second))};
}

OffsetSet OffsetSet::zeros(std::size_t count) { return OffsetSet(std::vector<std::optional<Pair>>(count)); }

double OffsetSet::operator()(std::size_t m, Point x) const {
    const auto& p = offsets_.at(m);
    if (!p) return 0.0;
    return (*p->source)(x) - (*p->base)(x);
}

Vector OffsetSet::evaluate(std::size_t m, const PointMatrix& xs) const {
    const auto& p = offsets_.at(m);
    if (!p) return Vector::Zero(xs.rows());
    return p->source->predict(xs) - p->base->predict(xs);
}

FittedRegressor fit_covariate_shift(const MultiSourceData& data, const WeightVector& weights, double lambda,
                                    const KernelSpec& spec) {
    check_lambda(lambda);
    if (weights.size() != data.total_size())
        throw ShapeError("weights must align with the flattened observations of all sets");
    return KernelRidge(data.pooled_xs(), spec).fit(data.pooled_ys(), weights, lambda);
}

FittedRegressor fit_covariate_shift(const MultiSourceData& data, double lambda, const KernelSpec& spec) {
    check_lambda(lambda);
    return KernelRidge(data.pooled_xs(), spec).fit(data.pooled_ys(), lambda);
}

OffsetSet estimate_offsets(const MultiSourceData& first_half, double lambda, const KernelSpec& spec,
                           std::size_t base_index) {
    check_lambda(lambda);
    if (base_index >= first_half.set_count()) throw ConfigError("offset base index out of range");
    std::vector<std::shared_ptr<const FittedRegressor>> fits(first_half.set_count());
    for (std::size_t m = 0; m < first_half.set_count(); ++m) {
        const auto& s = first_half.set(m);
        fits[m] = std::make_shared<const FittedRegressor>(KernelRidge(s.xs, spec).fit(s.ys, lambda));
    }
    std::vector<std::optional<OffsetSet::Pair>> pairs(first_half.set_count());
    for (std::size_t m = 0; m < first_half.set_count(); ++m)
        if (m != base_index) pairs[m] = OffsetSet::Pair{fits[m], fits[base_index]};
    return OffsetSet(std::move(pairs));
}

MultiSourceData calibrate(const MultiSourceData& second_half, const OffsetSet& offsets) {
    if (offsets.size() != second_half.set_count()) throw ShapeError("offset count does not match set count");
    std::vector<SampleSet> out(second_half.sets().begin(), second_half.sets().end());
    for (std::size_t m = 0; m < out.size(); ++m) {
        if (offsets.is_zero(m)) continue;
        const auto& pair = *offsets.pair(m);
        if (pair.source->spec().dim() != second_half.dim()) throw ShapeError("offset dimension mismatch");
        out[m].ys -= offsets.evaluate(m, out[m].xs);
    }
    return MultiSourceData(std::move(out));
}

CalibratedSplit prepare_distribution_shift(const MultiSourceData& data, double lambda, const KernelSpec& spec,
                                           std::uint64_t seed, const DistributionShiftOptions& options) {
    check_lambda(lambda);
    SplitData halves = split(data, seed, options.shuffle);
    OffsetSet offsets = options.zero_offsets ? OffsetSet::zeros(data.set_count())
                                             : estimate_offsets(halves.first_half, lambda, spec);
    MultiSourceData calibrated = calibrate(halves.second_half, offsets);
    return CalibratedSplit{std::move(halves), std::move(offsets), std::move(calibrated)};
}

Eigen::Index second_half_total(const MultiSourceData& data) {
    Eigen::Index n = 0;
    for (const auto& s : data.sets()) n += s.size() / 2;
    return n;
}

FittedRegressor fit_distribution_shift(const MultiSourceData& data, const WeightVector& weights, double lambda,
                                       const KernelSpec& spec, std::uint64_t seed,
                                       const DistributionShiftOptions& options) {
    if (weights.size() != second_half_total(data))
        throw ShapeError("weights must align with the flattened second-half observations");
    const auto prepared = prepare_distribution_shift(data, lambda, spec, seed, options);
    return fit_covariate_shift(prepared.calibrated, weights, lambda, spec);
}

}  // namespace inpr
