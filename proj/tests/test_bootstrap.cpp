#include "inpr/bootstrap.hpp"
#include "inpr/error.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

using namespace inpr;

namespace {

const KernelSpec kSob = KernelSpec::periodic_sobolev(2, 1);

SampleSet make_set(int id, Eigen::Index n, std::uint64_t seed, double shift = 0.0) {
    Rng rng(seed);
    SampleSet s;
    s.source_id = id;
    s.xs.resize(n, 1);
    s.ys.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        s.xs(i, 0) = rng.uniform();
        s.ys[i] = std::sin(2 * M_PI * s.xs(i, 0)) + shift + 0.3 * rng.normal();
    }
    return s;
}

PointMatrix grid(int n) {
    PointMatrix g(n, 1);
    for (int i = 0; i < n; ++i) g(i, 0) = i / (n - 1.0);
    return g;
}

BootstrapEnsemble small_ensemble(int B, std::uint64_t seed) {
    const auto t = make_set(0, 60, 3);
    KernelRidge solver(t.xs, kSob);
    EnsembleOptions o;
    o.replicates = B;
    o.seed = seed;
    return bootstrap_on_design(solver, t.ys, 1e-4, ShiftMode::Covariate, o);
}

}  // namespace

TEST_CASE("multiplier inverse CDF") {
    CHECK(multiplier_from_uniform(0.75) == 1.0);
    CHECK(multiplier_from_uniform(1.0) == 4.0);
    CHECK(multiplier_from_uniform(0.375) == doctest::Approx(0.5));
    CHECK(multiplier_from_uniform(0.875) == doctest::Approx(2.5));
    for (double u = 0.001; u <= 1.0; u += 0.001) {
        const double w = multiplier_from_uniform(u);
        CHECK(w > 0.0);
        CHECK(w <= 4.0);
        CHECK(multiplier_from_uniform(std::min(1.0, u + 0.001)) >= w);
    }
}

TEST_CASE("multiplier sample moments") {
    Rng rng(derive_seed(2718, {}));
    const auto w = sample_multipliers(1000000, MultiplierDistribution::Piecewise, rng);
    const Vector& v = w.values();
    const double mean = v.mean();
    const double var = (v.array() - mean).square().sum() / (v.size() - 1.0);
    const double below = (v.array() <= 1.0).cast<double>().mean();
    CHECK(std::fabs(mean - 1.0) < 0.005);
    CHECK(std::fabs(var - 1.0) < 0.01);
    CHECK(std::fabs(below - 0.75) < 0.002);
    CHECK(v.minCoeff() > 0.0);
    CHECK(v.maxCoeff() <= 4.0);

    Rng rng2(1);
    CHECK(sample_multipliers(5, MultiplierDistribution::UnitConstant, rng2).values() == Vector::Ones(5));
}

TEST_CASE("unit multipliers reproduce the base fit") {
    const auto t = make_set(0, 40, 5);
    KernelRidge solver(t.xs, kSob);
    EnsembleOptions o;
    o.replicates = 1;
    o.multipliers = MultiplierDistribution::UnitConstant;
    const auto ens = bootstrap_on_design(solver, t.ys, 1e-3, ShiftMode::Covariate, o);
    CHECK((ens.replicate(0).coeffs() - ens.base().coeffs()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("ensembles are reproducible per seed and per replicate") {
    const auto a = small_ensemble(20, 42);
    const auto b = small_ensemble(20, 42);
    CHECK(a.replicate_coeffs() == b.replicate_coeffs());
    const auto c = small_ensemble(20, 43);
    CHECK(a.replicate_coeffs() != c.replicate_coeffs());
    // Replicate b depends only on (seed, b): a longer run extends a shorter one.
    const auto longer = small_ensemble(30, 42);
    CHECK(longer.replicate_coeffs().leftCols(20) == a.replicate_coeffs());

    const auto t = make_set(0, 60, 3);
    KernelRidge solver(t.xs, kSob);
    EnsembleOptions o;
    o.replicates = 20;
    o.seed = 42;
    o.threads = 4;
    CHECK(bootstrap_on_design(solver, t.ys, 1e-4, ShiftMode::Covariate, o).replicate_coeffs() == a.replicate_coeffs());
}

TEST_CASE("distribution-mode ensemble shares one split") {
    const MultiSourceData d({make_set(0, 50, 7), make_set(1, 70, 8, 0.5)});
    EnsembleOptions o;
    o.replicates = 5;
    o.mode = ShiftMode::Distribution;
    o.seed = 1234;
    const auto ens = bootstrap_ensemble(d, 1e-4, kSob, o);
    const auto direct = fit_distribution_shift(d, WeightVector::ones(second_half_total(d)), 1e-4, kSob, 1234);
    CHECK(ens.base().coeffs() == direct.coeffs());
    CHECK(ens.design() == direct.design());
    CHECK(ens.mode() == ShiftMode::Distribution);
    CHECK(ens.size() == 5);
}

TEST_CASE("order statistic ranks") {
    CHECK(order_statistic_rank(0.025, 200) == 5);
    CHECK(order_statistic_rank(0.975, 200) == 195);
    CHECK(order_statistic_rank(0.95, 200) == 190);
    CHECK(order_statistic_rank(0.25, 4) == 1);
    CHECK(order_statistic_rank(0.75, 4) == 3);
    CHECK(order_statistic_rank(0.0001, 10) == 1);
    CHECK(order_statistic_rank(1.0, 10) == 10);
}

TEST_CASE("percentile intervals") {
    const auto [lo, hi] = percentile_interval(10.0, {2.0, -1.0, 1.0, -2.0}, 0.5);
    CHECK(lo == 9.0);
    CHECK(hi == 12.0);

    const auto [zlo, zhi] = percentile_interval(3.5, std::vector<double>(10, 0.0), 0.05);
    CHECK(zlo == 3.5);
    CHECK(zhi == 3.5);

    const std::vector<double> deltas{0.25, -0.5, 0.125, 1.0, -0.75, 0.5};
    const auto base = percentile_interval(2.0, deltas, 0.2);
    const auto moved = percentile_interval(2.0 + 4.0, deltas, 0.2);
    CHECK(moved.first - base.first == 4.0);
    CHECK(moved.second - base.second == 4.0);

    CHECK_THROWS_AS(percentile_interval(0.0, {1.0}, 0.05), ConfigError);
    CHECK_THROWS_AS(percentile_interval(0.0, {1.0, 2.0}, 1.0), ConfigError);
}

TEST_CASE("pointwise intervals from an ensemble") {
    const auto ens = small_ensemble(100, 9);
    const PointMatrix g = grid(11);
    const auto wide = pointwise_cis(ens, g, 0.01);
    const auto narrow = pointwise_cis(ens, g, 0.05);
    const Vector base = ens.base().predict(g);
    for (std::size_t i = 0; i < wide.size(); ++i) {
        CHECK(wide[i].lower <= narrow[i].lower);
        CHECK(wide[i].upper >= narrow[i].upper);
        CHECK(narrow[i].lower <= narrow[i].upper);
        CHECK(narrow[i].x[0] == g(static_cast<Eigen::Index>(i), 0));
    }
    const std::vector<double> x{g(4, 0)};
    const auto single = pointwise_ci(ens, x, 0.05);
    CHECK(single.lower == doctest::Approx(narrow[4].lower).epsilon(1e-12));
    CHECK(single.upper == doctest::Approx(narrow[4].upper).epsilon(1e-12));

    std::vector<int> order(100);
    std::iota(order.begin(), order.end(), 0);
    std::reverse(order.begin(), order.end());
    std::rotate(order.begin(), order.begin() + 37, order.end());
    const auto shuffled = ens.permuted(order);
    const auto again = pointwise_cis(shuffled, g, 0.05);
    for (std::size_t i = 0; i < again.size(); ++i) {
        CHECK(again[i].lower == narrow[i].lower);
        CHECK(again[i].upper == narrow[i].upper);
    }
    CHECK(global_region(shuffled, 0.05).radius == global_region(ens, 0.05).radius);
}

TEST_CASE("degenerate ensemble") {
    const auto t = make_set(0, 30, 10);
    KernelRidge solver(t.xs, kSob);
    EnsembleOptions o;
    o.replicates = 8;
    o.multipliers = MultiplierDistribution::UnitConstant;
    const auto ens = bootstrap_on_design(solver, t.ys, 1e-3, ShiftMode::Covariate, o);
    const std::vector<double> x{0.3};
    const auto ci = pointwise_ci(ens, x, 0.1);
    CHECK(ci.upper - ci.lower < 1e-12);
    CHECK(ci.lower == doctest::Approx(ens.base()(x)).epsilon(1e-12));
    CHECK(global_region(ens, 0.1).radius < 1e-12);
}

TEST_CASE("empirical norm") {
    CHECK(empirical_norm(std::vector<double>{0.0, 0.0, 0.0}) == 0.0);
    CHECK(empirical_norm(std::vector<double>(7, -2.5)) == 2.5);
    CHECK(empirical_norm(std::vector<double>{1.0, 2.0, 2.0}) == doctest::Approx(1.7320508).epsilon(1e-8));
    CHECK_THROWS_AS(empirical_norm(std::vector<double>{}), InputError);
}

TEST_CASE("global region radius and membership") {
    CHECK(region_radius({0.4, 0.1, 0.3, 0.2}, 0.25) == 0.3);
    CHECK(region_radius(std::vector<double>(5, 0.0), 0.05) == 0.0);

    GlobalRegion r{nullptr, 0.3, 0.05};
    const std::vector<double> base{1.0, 2.0, 3.0};
    CHECK(region_contains(r, base, base));
    const std::vector<double> edge{1.3, 2.3, 3.3};
    std::vector<double> diff(3);
    for (int i = 0; i < 3; ++i) diff[i] = edge[i] - base[i];
    GlobalRegion tight{nullptr, empirical_norm(diff), 0.05};
    CHECK(region_contains(tight, edge, base));
    const std::vector<double> inside{1.1, 2.0, 3.05};
    CHECK(region_contains(tight, inside, base));
    GlobalRegion zero{nullptr, 0.0, 0.05};
    CHECK(region_contains(zero, base, base));
    CHECK_FALSE(region_contains(zero, inside, base));
    CHECK_THROWS_AS(region_contains(r, std::vector<double>{1.0}, base), ShapeError);

    GlobalRegion exact{nullptr, 0.3, 0.05};
    const std::vector<double> zeros{0.0, 0.0, 0.0};
    const std::vector<double> point3{0.3, 0.3, 0.3};
    CHECK(region_contains(exact, point3, zeros) == (empirical_norm(point3) <= 0.3));
}

TEST_CASE("global region from an ensemble") {
    const auto ens = small_ensemble(60, 12);
    const auto region = global_region(ens, 0.1);
    CHECK(region.radius > 0.0);
    CHECK(region.center->coeffs() == ens.base().coeffs());
    const Vector base = ens.base_design_values();
    const Matrix reps = ens.replicate_design_values();
    int inside = 0;
    for (int b = 0; b < ens.size(); ++b) {
        const Vector f = reps.col(b);
        if (region_contains(region, {f.data(), static_cast<std::size_t>(f.size())},
                            {base.data(), static_cast<std::size_t>(base.size())}))
            ++inside;
    }
    CHECK(inside >= 54);
}
