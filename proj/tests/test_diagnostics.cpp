#include "inpr/diagnostics.hpp"
#include "inpr/error.hpp"
#include "inpr/random.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

using namespace inpr;

namespace {

double h_poly(double lambda, double beta = 2.0, int dim = 1, long trunc = 10000) {
    SpectralModel m;
    m.law = PolynomialLaw{beta, dim};
    m.truncation = trunc;
    return effective_dimension(lambda, m);
}

}  // namespace

TEST_CASE("effective dimension reference values") {
    double inv = 0.0;
    for (long nu = 10000; nu >= 1; --nu) inv += 1.0 / (1.0 + std::pow(static_cast<double>(nu), 4.0));
    CHECK(inv == doctest::Approx(0.5785).epsilon(1e-4));
    CHECK(h_poly(1.0) == doctest::Approx(1.0 / inv).epsilon(1e-9));
    CHECK(h_poly(1.0) == doctest::Approx(1.730).epsilon(1e-3));
    CHECK(h_poly(1e12) > 1e6);
}

TEST_CASE("effective dimension grows like lambda^(1/4)") {
    double mx = 0, my = 0;
    std::vector<std::pair<double, double>> pts;
    for (int k = 0; k <= 24; ++k) {
        const double lambda = std::pow(10.0, -8.0 + 0.25 * k);
        pts.emplace_back(std::log(lambda), std::log(h_poly(lambda)));
    }
    for (const auto& [x, y] : pts) {
        mx += x;
        my += y;
    }
    mx /= pts.size();
    my /= pts.size();
    double sxx = 0, sxy = 0;
    for (const auto& [x, y] : pts) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    const double slope = sxy / sxx;
    CAPTURE(slope);
    CHECK(slope >= 0.24);
    CHECK(slope <= 0.26);
}

TEST_CASE("effective dimension is increasing and continuous in lambda") {
    double prev = 0.0;
    for (int k = 0; k <= 200; ++k) {
        const double lambda = std::pow(10.0, -8.0 + 0.05 * k);
        const double h = h_poly(lambda);
        CHECK(h > prev);
        const double nearby = h_poly(lambda * (1.0 + 1e-9));
        CHECK(std::fabs(nearby - h) < 1e-6 * h);
        prev = h;
    }
}

TEST_CASE("effective dimension errors and the exponential law") {
    CHECK_THROWS_AS(h_poly(0.0), DomainError);
    CHECK_THROWS_AS(h_poly(-1.0), DomainError);
    CHECK_THROWS_AS(h_poly(1e-3, 0.5, 1), DomainError);
    CHECK_THROWS_AS(h_poly(1e-14, 2.0, 1, 10), TruncationError);
    CHECK_THROWS_AS(h_poly(1e-3, 2.0, 1, 5), ConfigError);

    SpectralModel e;
    e.law = ExponentialLaw{1.0};
    const double h = effective_dimension(1e-6, e);
    double inv = 0.0;
    for (int nu = 1; nu < 60; ++nu) inv += 1.0 / (1.0 + 1e-6 * std::exp(nu));
    CHECK(h == doctest::Approx(1.0 / inv).epsilon(1e-12));
    e.law = ExponentialLaw{0.05};
    e.truncation = 10;
    CHECK_THROWS_AS(effective_dimension(1e-6, e), TruncationError);
}

TEST_CASE("balance exponent") {
    CHECK(balance_exponent(2.0, 1).exponent == doctest::Approx(0.875).epsilon(1e-15));
    CHECK(balance_exponent(10.0, 1).exponent == doctest::Approx(499.0 / 840.0).epsilon(1e-15));
    CHECK(balance_exponent(10.0, 1).exponent == doctest::Approx(0.5940).epsilon(1e-4));
    CHECK(balance_exponent(2.0, 1).valid);
    const auto bad = balance_exponent(1.0, 1);
    CHECK_FALSE(bad.valid);
    CHECK_FALSE(bad.note.empty());
    for (int d = 1; d <= 5; ++d)
        for (double beta = 0.05; beta < 40.0; beta *= 1.1) {
            const auto e = balance_exponent(beta, d);
            CHECK(e.valid == (beta > (3.0 + std::sqrt(5.0)) / 4.0 * d));
            if (e.valid) CHECK(e.exponent < 1.0);
        }
    CHECK_THROWS_AS(balance_exponent(0.0, 1), ConfigError);
}

TEST_CASE("balance advisory") {
    const std::vector<long> single{500};
    const auto one = balance_check(single, 2.0, 1);
    CHECK(one.passes == std::vector<bool>{true});
    CHECK(one.flagged.empty());
    CHECK(one.heuristic);

    const std::vector<long> skewed{200, 1600};
    const auto adv = balance_check(skewed, 2.0, 1);
    CHECK(adv.total == 1800.0);
    CHECK(adv.threshold == doctest::Approx(std::pow(1800.0, 0.875)).epsilon(1e-14));
    CHECK(adv.threshold > 700.0);
    CHECK(adv.threshold < 712.0);
    CHECK(adv.flagged == std::vector<std::size_t>{0});
    CHECK(adv.passes == std::vector<bool>{false, true});

    const std::vector<long> even{1000000, 1000000, 1000000};
    CHECK(balance_check(even, 2.0, 1).flagged.empty());
    CHECK(balance_check(skewed, 2.0, 1, 0.1).flagged.empty());
    CHECK_THROWS_AS(balance_check(std::vector<long>{}, 2.0, 1), InputError);
}

TEST_CASE("local variance") {
    const std::vector<double> zeros(5, 0.0);
    const std::vector<double> col{0.2, 0.4, 1.0, -0.3, 0.9};
    CHECK(local_variance(zeros, col, 5) == 0.0);
    CHECK(local_variance(std::vector<double>{2.0}, std::vector<double>{0.5}, 1) == 1.0);

    Rng rng(1);
    std::vector<double> e(40), k(40);
    for (int i = 0; i < 40; ++i) {
        e[i] = rng.normal();
        k[i] = rng.uniform() * 3.0 - 1.0;
    }
    const double base = local_variance(e, k, 40);
    std::vector<double> scaled(e);
    for (auto& v : scaled) v *= 2.5;
    CHECK(local_variance(scaled, k, 40) == doctest::Approx(6.25 * base).epsilon(1e-13));

    std::vector<int> perm(40);
    for (int i = 0; i < 40; ++i) perm[i] = (i * 7) % 40;
    std::vector<double> pe(40), pk(40);
    for (int i = 0; i < 40; ++i) {
        pe[i] = e[perm[i]];
        pk[i] = k[perm[i]];
    }
    CHECK(local_variance(pe, pk, 40) == doctest::Approx(base).epsilon(1e-13));

    double me = 0.0, mk = 0.0;
    for (int i = 0; i < 40; ++i) {
        me = std::max(me, e[i] * e[i]);
        mk = std::max(mk, k[i] * k[i]);
    }
    CHECK(base <= me * mk / 40.0);

    CHECK_THROWS_AS(local_variance(e, std::vector<double>(3, 1.0), 40), ShapeError);
    CHECK_THROWS_AS(local_variance(e, k, 39), ShapeError);
}

TEST_CASE("equivalent kernel and the plug-in local variance") {
    Rng rng(2);
    PointMatrix xs(50, 1);
    Vector ys(50);
    for (int i = 0; i < 50; ++i) {
        xs(i, 0) = rng.uniform();
        ys[i] = std::sin(2 * M_PI * xs(i, 0)) + 0.3 * rng.normal();
    }
    const KernelRidge solver(xs, KernelSpec::periodic_sobolev(2, 1));
    const std::vector<double> x{0.5};
    const Vector col = equivalent_kernel_column(solver, 1e-4, x);
    // f(x) = (1/n) sum_i K(x_i, x) y_i for the unit-weight fit.
    const double via_kernel = col.dot(ys) / 50.0;
    CHECK(via_kernel == doctest::Approx(solver.fit(ys, 1e-4)(x)).epsilon(1e-9));
    CHECK(estimate_local_variance(solver, ys, 1e-4, x) > 0.0);
}

TEST_CASE("rate slope") {
    std::vector<std::pair<double, double>> exact;
    for (double n : {100.0, 200.0, 400.0, 800.0, 1600.0}) exact.emplace_back(n, std::pow(n, -0.8));
    CHECK(std::fabs(rate_slope(exact) + 0.8) < 1e-12);
    std::vector<std::pair<double, double>> flat{{10, 3.0}, {20, 3.0}, {40, 3.0}};
    CHECK(std::fabs(rate_slope(flat)) < 1e-15);
    std::vector<std::pair<double, double>> bad{{10, 3.0}, {20, 0.0}, {40, 3.0}};
    CHECK_THROWS_AS(rate_slope(bad), DomainError);
    std::vector<std::pair<double, double>> dup{{10, 3.0}, {10, 2.0}, {40, 3.0}};
    CHECK_THROWS_AS(rate_slope(dup), ConfigError);
    CHECK_THROWS_AS(rate_slope(std::vector<std::pair<double, double>>{{1, 1}, {2, 1}}), ConfigError);
}
