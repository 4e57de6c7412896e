#include "inpr/diagnostics.hpp"

#include "inpr/error.hpp"
#include "inpr/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace inpr {

namespace {

double polynomial_inverse_h(double lambda, const PolynomialLaw& law, long truncation) {
    if (!(law.beta > 0.0) || law.dim < 1) throw ConfigError("polynomial law needs beta > 0 and dim >= 1");
    const double p = 2.0 * law.beta / law.dim;
    if (!(p > 1.0)) throw DomainError("sum of (1 + lambda nu^p)^-1 diverges for p <= 1 (need beta > dim / 2)");
    double sum = 0.0;
    for (long nu = 1; nu <= truncation; ++nu) sum += 1.0 / (1.0 + lambda * std::pow(static_cast<double>(nu), p));
    const double t = static_cast<double>(truncation);
    const double bound = std::pow(t, 1.0 - p) / (lambda * (p - 1.0));
    if (bound >= 1e-6 * sum)
        throw TruncationError("spectral tail bound " + std::to_string(bound) + " exceeds 1e-6 of the partial sum");
    // Integral of (lambda x^p)^-1 beyond T + 1/2.
    sum += std::pow(t + 0.5, 1.0 - p) / (lambda * (p - 1.0));
    return sum;
}

double exponential_inverse_h(double lambda, const ExponentialLaw& law, long truncation) {
    if (!(law.beta > 0.0)) throw ConfigError("exponential law needs beta > 0");
    double sum = 0.0;
    for (long nu = 1; nu <= truncation; ++nu) {
        const double rho = std::exp(std::pow(static_cast<double>(nu), law.beta));
        const double term = 1.0 / (1.0 + lambda * rho);
        sum += term;
        if (term < 1e-16) return sum;
    }
    throw TruncationError("exponential spectral sum did not reach 1e-16 terms within the truncation");
}

}  // namespace

double effective_dimension(double lambda, const SpectralModel& model) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("effective dimension needs lambda > 0");
    if (model.truncation < 10) throw ConfigError("spectral truncation must be >= 10");
    const double inv = std::visit(
        [&](const auto& law) {
            using T = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<T, PolynomialLaw>)
                return polynomial_inverse_h(lambda, law, model.truncation);
            else
                return exponential_inverse_h(lambda, law, model.truncation);
        },
        model.law);
    return 1.0 / inv;
}

BalanceExponent balance_exponent(double beta, int dim) {
    if (!(beta > 0.0) || dim < 1) throw ConfigError("balance exponent needs beta > 0 and dim >= 1");
    const double d = dim;
    BalanceExponent out;
    out.exponent = (4.0 * beta * beta + 10.0 * beta * d - d * d) / (4.0 * beta * (2.0 * beta + d));
    const double bound = (3.0 + std::sqrt(5.0)) / 4.0 * d;
    if (!(beta > bound)) {
        out.valid = false;
        std::ostringstream os;
        os << "beta = " << beta << " does not exceed (3 + sqrt 5)/4 * d = " << bound
           << "; the sample-size relationship is not guaranteed to be meaningful";
        out.note = os.str();
    }
    return out;
}

BalanceAdvisory balance_check(std::span<const long> sizes, double beta, int dim, double slack) {
    if (sizes.empty()) throw InputError("balance check needs at least one sample size");
    if (!(slack > 0.0)) throw ConfigError("balance slack must be > 0");
    BalanceAdvisory out;
    for (long s : sizes) {
        if (s < 0) throw InputError("sample sizes must be non-negative");
        out.total += static_cast<double>(s);
    }
    const auto e = balance_exponent(beta, dim);
    out.exponent = e.exponent;
    out.exponent_valid = e.valid;
    out.threshold = slack * std::pow(out.total, e.exponent);
    for (std::size_t m = 0; m < sizes.size(); ++m) {
        const bool ok = static_cast<double>(sizes[m]) >= out.threshold;
        out.passes.push_back(ok);
        if (!ok) out.flagged.push_back(m);
    }
    return out;
}

double local_variance(std::span<const double> residuals, std::span<const double> kernel_column, long n_total) {
    if (residuals.size() != kernel_column.size()) throw ShapeError("residuals and kernel column differ in length");
    if (n_total != static_cast<long>(residuals.size())) throw ShapeError("n_total must equal the residual count");
    if (n_total < 1) throw InputError("local variance needs at least one observation");
    double acc = 0.0;
    for (std::size_t i = 0; i < residuals.size(); ++i) {
        const double t = residuals[i] * kernel_column[i];
        acc += t * t;
    }
    const double n = static_cast<double>(n_total);
    return acc / (n * n);
}

Vector equivalent_kernel_column(const KernelRidge& solver, double lambda, Point x) {
    check_lambda(lambda);
    PointMatrix one(1, static_cast<Eigen::Index>(x.size()));
    for (std::size_t j = 0; j < x.size(); ++j) one(0, static_cast<Eigen::Index>(j)) = x[j];
    const Vector gx = cross_kernel(*solver.shared_design(), one, solver.spec()).col(0);
    const double n = static_cast<double>(solver.size());
    return n * linalg::solve_spd_shifted(solver.gram().entries(), n * lambda, gx);
}

double estimate_local_variance(const KernelRidge& solver, const Vector& ys, double lambda, Point x) {
    const Vector c = solver.coefficients(ys, lambda);
    const Vector resid = ys - solver.design_values(c);
    const Vector col = equivalent_kernel_column(solver, lambda, x);
    return local_variance(std::span<const double>(resid.data(), static_cast<std::size_t>(resid.size())),
                          std::span<const double>(col.data(), static_cast<std::size_t>(col.size())),
                          static_cast<long>(resid.size()));
}

double rate_slope(std::span<const std::pair<double, double>> mise_by_n) {
    if (mise_by_n.size() < 3) throw ConfigError("rate slope needs at least 3 points");
    std::set<double> seen;
    double mx = 0.0;
    double my = 0.0;
    for (const auto& [n, mise] : mise_by_n) {
        if (!(n > 0.0)) throw DomainError("sample sizes must be positive");
        if (!(mise > 0.0)) throw DomainError("MISE values must be positive");
        if (!seen.insert(n).second) throw ConfigError("sample sizes must be distinct");
        mx += std::log(n);
        my += std::log(mise);
    }
    const double k = static_cast<double>(mise_by_n.size());
    mx /= k;
    my /= k;
    double sxy = 0.0;
    double sxx = 0.0;
    for (const auto& [n, mise] : mise_by_n) {
        const double dx = std::log(n) - mx;
        sxy += dx * (std::log(mise) - my);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

}  // namespace inpr
