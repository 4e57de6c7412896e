#pragma once

#include "inpr/random.hpp"
#include "inpr/ridge.hpp"
#include "inpr/shift.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace inpr {

enum class SettingKind {
    /// d = 1: 3 sin(2 pi (x - tau)) - exp(x) + x^2
    Setting1,
    /// d = 2: 3 sin(2 pi (x1 - tau)) - exp(x1) + (x1 - x2)^2
    Setting2,
};

struct SimSetting {
    SettingKind kind = SettingKind::Setting1;
    /// Var f^(0)(X) / sigma^2.
    double snr = 10.0;

    int dim() const noexcept { return kind == SettingKind::Setting1 ? 1 : 2; }
    std::string name() const { return kind == SettingKind::Setting1 ? "setting1" : "setting2"; }
};

void check_tau(double tau);

/// Mean function f^(m) with phase tau (tau = 0 is the target).
double truth(const SimSetting& setting, double tau, Point x);
Vector truth_on(const SimSetting& setting, double tau, const PointMatrix& xs);

/// Gauss-Legendre nodes and weights mapped to [0, 1].
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
QuadratureRule gauss_legendre_unit(int count);

/// Variance of f(X), X ~ U([0,1]^dim), by tensor Gauss-Legendre quadrature.
double unit_cube_variance(const std::function<double(Point)>& f, int dim, int nodes_per_axis = 200);

/// Noise variance giving the configured signal-to-noise ratio for f^(0).
double snr_sigma2(const SimSetting& setting, double tau0 = 0.0, int nodes_per_axis = 200);

/// n observations with x ~ U([0,1]^d) and y = truth(x) + N(0, sigma2).
/// Each observation draws its coordinates and then its noise, so a longer
/// sample from the same stream extends a shorter one.
SampleSet generate(const SimSetting& setting, double tau, Eigen::Index n, double sigma2, Rng& rng,
                   int source_id = 0);

/// Midpoint-rule integral over [0,1]^d of (prediction - truth)^2; grid_size points per axis.
double integrated_squared_error(const std::function<Vector(const PointMatrix&)>& predict,
                                const std::function<double(Point)>& target, int dim, int grid_size);

/// ISE of a fitted model against f^(0). grid_size 0 picks 1000 (d = 1) or 100 per axis (d = 2).
double ise(const FittedRegressor& model, const SimSetting& setting, double tau0 = 0.0, int grid_size = 0);

enum class LambdaPolicy {
    /// GCV on all provided observations pooled with unit weights.
    PooledGcv,
    /// GCV on the target sample alone.
    TargetGcv,
    /// Use ExperimentConfig::fixed_lambda.
    Fixed,
};

std::string to_string(LambdaPolicy policy);
LambdaPolicy lambda_policy_from_string(const std::string& s);

struct ExperimentConfig {
    SimSetting setting;
    int n0 = 200;
    std::vector<double> ratios{0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0};
    double tau_source = 0.05;
    int B = 200;
    int reps = 100;
    std::uint64_t seed = 1;
    std::vector<double> lambda_grid = log_grid();
    /// Points per axis of the coverage grid (equispaced, endpoints included).
    int eval_grid_size = 21;
    /// Points per axis for ISE; 0 selects the default for the dimension.
    int ise_grid_size = 0;
    double alpha = 0.05;
    LambdaPolicy lambda_policy = LambdaPolicy::PooledGcv;
    double fixed_lambda = 1e-4;
    /// Draw 2 n_m observations per set so that each half of the split has n_m.
    /// Off by default: n_m are drawn and the fit halves them.
    bool fresh_halves = false;
    bool shuffle = false;
    int threads = 1;

    /// Throws ConfigError on invalid values.
    void validate() const;
};

struct ReportRow {
    std::string setting;
    double tau = 0.0;
    int n0 = 0;
    double ratio = 0.0;
    std::string statistic;
    double value = 0.0;
    double mc_stderr = 0.0;
    int reps = 0;
    std::uint64_t seed = 0;
};

struct ExperimentReport {
    std::vector<ReportRow> rows;

    /// Rows matching (ratio, statistic); throws InputError if absent.
    const ReportRow& find(double ratio, const std::string& statistic) const;

    /// Header setting,tau,n0,ratio,statistic,value,mc_stderr,reps,seed; values in %.17g.
    void write_csv(std::ostream& os) const;
};

/// One Monte Carlo replication: the data generated for (rep, ratio).
struct ReplicationData {
    MultiSourceData data;
    std::uint64_t split_seed = 0;
    std::uint64_t multiplier_seed = 0;
};

/// Data for replication `rep` at `ratio`. The target, source, split and
/// multiplier streams are independent sub-generators of (seed, rep), so the
/// target sample is shared across ratios and B never affects the data.
ReplicationData replication_data(const ExperimentConfig& cfg, int rep, double ratio, double sigma2);

/// Target-only unit-weight fit used at ratio 0 (the first n0 target observations).
FittedRegressor target_only_fit(const SampleSet& target, Eigen::Index n0, const ExperimentConfig& cfg);

/// Lambda for a replication under the configured policy.
double choose_lambda(const MultiSourceData& data, const KernelSpec& spec, const ExperimentConfig& cfg);

/// MISE of the distribution-shift estimator per ratio (target-only at ratio 0).
/// Statistics: "mise", "log10_lambda".
ExperimentReport run_mise_experiment(const ExperimentConfig& cfg);

/// Pointwise-CI and global-region coverage of f^(0) per ratio.
/// Statistics: "coverage[x=...]" per grid point, "coverage_mean" and
/// "coverage_min" over the interior grid, "region_coverage", "ci_width_mean".
ExperimentReport run_coverage_experiment(const ExperimentConfig& cfg);

/// Target-only MISE for each sample size. Rows use n0 = n, ratio 0, statistic "mise".
ExperimentReport run_rate_experiment(const SimSetting& setting, const std::vector<int>& sizes, int reps,
                                     std::uint64_t seed, const std::vector<double>& lambda_grid, int threads = 1);

/// Equispaced grid with `per_axis` points per axis on [0,1]^dim.
PointMatrix uniform_grid(int dim, int per_axis);

/// Kernel used by the simulation settings: periodic Sobolev of order 2.
KernelSpec simulation_kernel(const SimSetting& setting);

}  // namespace inpr
