#pragma once

#include "inpr/ridge.hpp"

#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace inpr {

/// Eigenvalue law rho_nu = nu^(2 beta / dim).
struct PolynomialLaw {
    double beta = 2.0;
    int dim = 1;
};

/// Eigenvalue law rho_nu = exp(nu^beta).
struct ExponentialLaw {
    double beta = 1.0;
};

struct SpectralModel {
    std::variant<PolynomialLaw, ExponentialLaw> law = PolynomialLaw{};
    long truncation = 10000;
};

/// h = 1 / sum_nu (1 + lambda rho_nu)^{-1}.
///
/// Polynomial law: the first `truncation` terms are summed exactly and the
/// remainder is replaced by its integral approximation. Throws
/// TruncationError when the tail bound T^(1-p) / (lambda (p - 1)) exceeds
/// 1e-6 of the sum. Exponential law: summation stops once a term drops
/// below 1e-16; running out of `truncation` terms first is an error.
double effective_dimension(double lambda, const SpectralModel& model);

struct BalanceExponent {
    double exponent = 0.0;
    /// False when beta <= (3 + sqrt 5)/4 * dim; the exponent is still reported.
    bool valid = true;
    std::string note;
};

/// (4 beta^2 + 10 beta d - d^2) / (4 beta (2 beta + d)).
BalanceExponent balance_exponent(double beta, int dim);

struct BalanceAdvisory {
    double total = 0.0;
    double exponent = 0.0;
    bool exponent_valid = true;
    /// slack * n^exponent
    double threshold = 0.0;
    std::vector<bool> passes;
    std::vector<std::size_t> flagged;
    /// Always true: "much smaller than" has no constant, so the check is a heuristic.
    bool heuristic = true;
};

/// Flags every set whose size falls below slack * n^exponent, n = sum of sizes.
BalanceAdvisory balance_check(std::span<const long> sizes, double beta, int dim, double slack = 1.0);

/// (1/n^2) sum_i e_i^2 K(x_i, x)^2.
double local_variance(std::span<const double> residuals, std::span<const double> kernel_column, long n_total);

/// Empirical equivalent kernel at x: n (G + n lambda I)^{-1} g_x, with G the
/// Gram matrix of the design and g_x = (R(x_i, x))_i. Row i is K(x_i, x) for
/// the lambda-dependent inner product V + lambda <.,.>_H.
Vector equivalent_kernel_column(const KernelRidge& solver, double lambda, Point x);

/// tau_n^2(x) from the unit-weight fit: residuals y - f(x_i) and the equivalent kernel.
double estimate_local_variance(const KernelRidge& solver, const Vector& ys, double lambda, Point x);

/// Least-squares slope of log(mise) against log(n).
double rate_slope(std::span<const std::pair<double, double>> mise_by_n);

}  // namespace inpr
