#include "inpr/simlab.hpp"

#include "inpr/bootstrap.hpp"
#include "inpr/error.hpp"
#include "inpr/parallel.hpp"

#include <boost/math/special_functions/legendre.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

namespace inpr {

void check_tau(double tau) {
    if (!(tau >= 0.0 && tau <= 0.5)) throw ConfigError("tau must lie in [0, 0.5]");
}

double truth(const SimSetting& setting, double tau, Point x) {
    if (static_cast<int>(x.size()) != setting.dim())
        throw ShapeError(setting.name() + " expects points of dimension " + std::to_string(setting.dim()));
    check_tau(tau);
    for (double v : x)
        if (!(v >= 0.0 && v <= 1.0)) throw DomainError("simulation inputs must lie in [0,1]^d");
    const double x1 = x[0];
    const double base = 3.0 * std::sin(2.0 * std::numbers::pi * (x1 - tau)) - std::exp(x1);
    if (setting.kind == SettingKind::Setting1) return base + x1 * x1;
    const double diff = x1 - x[1];
    return base + diff * diff;
}

Vector truth_on(const SimSetting& setting, double tau, const PointMatrix& xs) {
    Vector out(xs.rows());
    for (Eigen::Index i = 0; i < xs.rows(); ++i) out[i] = truth(setting, tau, row_of(xs, i));
    return out;
}

QuadratureRule gauss_legendre_unit(int count) {
    if (count < 1) throw ConfigError("quadrature needs at least one node");
    const auto zeros = boost::math::legendre_p_zeros<double>(count);
    std::vector<double> xs;
    for (double z : zeros)
        if (z > 0.0) {
            xs.push_back(z);
            xs.push_back(-z);
        } else {
            xs.push_back(0.0);
        }
    std::sort(xs.begin(), xs.end());
    QuadratureRule rule;
    for (double z : xs) {
        const double dp = boost::math::legendre_p_prime(count, z);
        const double w = 2.0 / ((1.0 - z * z) * dp * dp);
        rule.nodes.push_back(0.5 * (z + 1.0));
        rule.weights.push_back(0.5 * w);
    }
    return rule;
}

double unit_cube_variance(const std::function<double(Point)>& f, int dim, int nodes_per_axis) {
    if (dim < 1 || dim > 3) throw ConfigError("unit_cube_variance supports dimensions 1 to 3");
    const auto rule = gauss_legendre_unit(nodes_per_axis);
    const std::size_t k = rule.nodes.size();
    std::size_t total = 1;
    for (int j = 0; j < dim; ++j) total *= k;
    std::vector<double> p(static_cast<std::size_t>(dim));
    double m1 = 0.0;
    double m2 = 0.0;
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t rest = idx;
        double w = 1.0;
        for (int j = dim - 1; j >= 0; --j) {
            const std::size_t a = rest % k;
            rest /= k;
            p[static_cast<std::size_t>(j)] = rule.nodes[a];
            w *= rule.weights[a];
        }
        const double v = f(p);
        m1 += w * v;
        m2 += w * v * v;
    }
    return std::max(0.0, m2 - m1 * m1);
}

double snr_sigma2(const SimSetting& setting, double tau0, int nodes_per_axis) {
    if (!(setting.snr > 0.0)) throw ConfigError("snr must be > 0");
    check_tau(tau0);
    const double var = unit_cube_variance([&](Point x) { return truth(setting, tau0, x); }, setting.dim(),
                                          nodes_per_axis);
    return var / setting.snr;
}

SampleSet generate(const SimSetting& setting, double tau, Eigen::Index n, double sigma2, Rng& rng, int source_id) {
    if (n < 1) throw ConfigError("sample size must be >= 1");
    if (!(sigma2 >= 0.0)) throw ConfigError("noise variance must be >= 0");
    check_tau(tau);
    const int d = setting.dim();
    const double sd = std::sqrt(sigma2);
    SampleSet out;
    out.source_id = source_id;
    out.xs.resize(n, d);
    out.ys.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (int j = 0; j < d; ++j) out.xs(i, j) = rng.uniform();
        const double noise = rng.normal();
        out.ys[i] = truth(setting, tau, row_of(out.xs, i)) + sd * noise;
    }
    return out;
}

double integrated_squared_error(const std::function<Vector(const PointMatrix&)>& predict,
                                const std::function<double(Point)>& target, int dim, int grid_size) {
    if (grid_size < 10) throw ConfigError("ISE grid needs at least 10 points per axis");
    if (dim < 1 || dim > 3) throw ConfigError("ISE supports dimensions 1 to 3");
    Eigen::Index total = 1;
    for (int j = 0; j < dim; ++j) total *= grid_size;
    constexpr Eigen::Index chunk = 1000;
    double acc = 0.0;
    for (Eigen::Index start = 0; start < total; start += chunk) {
        const Eigen::Index len = std::min(chunk, total - start);
        PointMatrix pts(len, dim);
        for (Eigen::Index r = 0; r < len; ++r) {
            Eigen::Index rest = start + r;
            for (int j = dim - 1; j >= 0; --j) {
                pts(r, j) = (static_cast<double>(rest % grid_size) + 0.5) / grid_size;
                rest /= grid_size;
            }
        }
        const Vector pred = predict(pts);
        for (Eigen::Index r = 0; r < len; ++r) {
            const double e = pred[r] - target(row_of(pts, r));
            acc += e * e;
        }
    }
    return acc / static_cast<double>(total);
}

double ise(const FittedRegressor& model, const SimSetting& setting, double tau0, int grid_size) {
    if (grid_size == 0) grid_size = setting.dim() == 1 ? 1000 : 100;
    return integrated_squared_error([&](const PointMatrix& pts) { return model.predict(pts); },
                                    [&](Point x) { return truth(setting, tau0, x); }, setting.dim(), grid_size);
}

std::string to_string(LambdaPolicy policy) {
    switch (policy) {
        case LambdaPolicy::PooledGcv:
            return "pooled";
        case LambdaPolicy::TargetGcv:
            return "target";
        case LambdaPolicy::Fixed:
            return "fixed";
    }
    return "unknown";
}

LambdaPolicy lambda_policy_from_string(const std::string& s) {
    if (s == "pooled") return LambdaPolicy::PooledGcv;
    if (s == "target") return LambdaPolicy::TargetGcv;
    if (s == "fixed") return LambdaPolicy::Fixed;
    throw ConfigError("unknown lambda policy '" + s + "' (expected pooled, target or fixed)");
}

void ExperimentConfig::validate() const {
    if (!(setting.snr > 0.0)) throw ConfigError("snr must be > 0");
    if (n0 < 10) throw ConfigError("n0 must be >= 10");
    if (ratios.empty()) throw ConfigError("ratio list is empty");
    for (double r : ratios)
        if (!(r >= 0.0) || !std::isfinite(r)) throw ConfigError("ratios must be finite and >= 0");
    check_tau(tau_source);
    if (reps < 1) throw ConfigError("reps must be >= 1");
    if (B < 1) throw ConfigError("B must be >= 1");
    if (lambda_grid.empty()) throw ConfigError("lambda grid is empty");
    for (double l : lambda_grid) check_lambda(l);
    if (lambda_policy == LambdaPolicy::Fixed) check_lambda(fixed_lambda);
    if (eval_grid_size < 2) throw ConfigError("evaluation grid needs at least 2 points per axis");
    if (ise_grid_size != 0 && ise_grid_size < 10) throw ConfigError("ISE grid needs at least 10 points per axis");
    check_alpha(alpha);
    if (threads < 1) throw ConfigError("threads must be >= 1");
}

const ReportRow& ExperimentReport::find(double ratio, const std::string& statistic) const {
    for (const auto& r : rows)
        if (r.ratio == ratio && r.statistic == statistic) return r;
    throw InputError("report has no row for statistic '" + statistic + "' at ratio " + std::to_string(ratio));
}

namespace {

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_coord(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

struct Summary {
    double mean = 0.0;
    double stderr_ = 0.0;
};

Summary summarize(const std::vector<double>& v) {
    Summary s;
    const double k = static_cast<double>(v.size());
    for (double x : v) s.mean += x;
    s.mean /= k;
    if (v.size() > 1) {
        double ss = 0.0;
        for (double x : v) ss += (x - s.mean) * (x - s.mean);
        s.stderr_ = std::sqrt(ss / (k - 1.0) / k);
    }
    return s;
}

ReportRow make_row(const ExperimentConfig& cfg, double ratio, std::string stat, Summary s) {
    return ReportRow{cfg.setting.name(), cfg.tau_source, cfg.n0, ratio, std::move(stat), s.mean, s.stderr_,
                     cfg.reps, cfg.seed};
}

Eigen::Index source_size(const ExperimentConfig& cfg, double ratio) {
    return static_cast<Eigen::Index>(std::llround(ratio * cfg.n0));
}

double gcv_on(const SampleSet& s, const KernelSpec& spec, const std::vector<double>& grid) {
    return KernelRidge(s.xs, spec).select_lambda(s.ys, grid);
}

SampleSet head(const SampleSet& s, Eigen::Index n) {
    SampleSet out;
    out.source_id = s.source_id;
    out.xs = s.xs.topRows(n);
    out.ys = s.ys.head(n);
    return out;
}

/// Final-stage design and responses for one replication, plus its lambda.
struct FinalStage {
    std::shared_ptr<const PointMatrix> design;
    Vector ys;
    double lambda = 0.0;
    ShiftMode mode = ShiftMode::Covariate;
};

FinalStage final_stage(const ExperimentConfig& cfg, const ReplicationData& rd, const KernelSpec& spec) {
    FinalStage out;
    if (rd.data.source_count() == 0) {
        const SampleSet t = head(rd.data.target(), cfg.n0);
        out.lambda = cfg.lambda_policy == LambdaPolicy::Fixed ? cfg.fixed_lambda : gcv_on(t, spec, cfg.lambda_grid);
        out.design = std::make_shared<const PointMatrix>(t.xs);
        out.ys = t.ys;
        out.mode = ShiftMode::Covariate;
        return out;
    }
    out.lambda = choose_lambda(rd.data, spec, cfg);
    DistributionShiftOptions opts;
    opts.shuffle = cfg.shuffle;
    const auto prepared = prepare_distribution_shift(rd.data, out.lambda, spec, rd.split_seed, opts);
    out.design = std::make_shared<const PointMatrix>(prepared.calibrated.pooled_xs());
    out.ys = prepared.calibrated.pooled_ys();
    out.mode = ShiftMode::Distribution;
    return out;
}

}  // namespace

void ExperimentReport::write_csv(std::ostream& os) const {
    os << "setting,tau,n0,ratio,statistic,value,mc_stderr,reps,seed\n";
    for (const auto& r : rows) {
        os << r.setting << ',' << fmt17(r.tau) << ',' << r.n0 << ',' << fmt17(r.ratio) << ',' << r.statistic << ','
           << fmt17(r.value) << ',' << fmt17(r.mc_stderr) << ',' << r.reps << ',' << r.seed << '\n';
    }
}

KernelSpec simulation_kernel(const SimSetting& setting) { return KernelSpec::periodic_sobolev(2, setting.dim()); }

PointMatrix uniform_grid(int dim, int per_axis) {
    if (per_axis < 2) throw ConfigError("grid needs at least 2 points per axis");
    Eigen::Index total = 1;
    for (int j = 0; j < dim; ++j) total *= per_axis;
    PointMatrix out(total, dim);
    for (Eigen::Index r = 0; r < total; ++r) {
        Eigen::Index rest = r;
        for (int j = dim - 1; j >= 0; --j) {
            out(r, j) = static_cast<double>(rest % per_axis) / (per_axis - 1);
            rest /= per_axis;
        }
    }
    return out;
}

ReplicationData replication_data(const ExperimentConfig& cfg, int rep, double ratio, double sigma2) {
    const auto r = static_cast<std::uint64_t>(rep);
    const Eigen::Index n1 = source_size(cfg, ratio);
    const bool has_source = n1 > 0;
    const Eigen::Index target_n = has_source && cfg.fresh_halves ? 2 * Eigen::Index{cfg.n0} : cfg.n0;

    std::vector<SampleSet> sets;
    Rng target_rng(derive_seed(cfg.seed, {r, 1}));
    sets.push_back(generate(cfg.setting, 0.0, target_n, sigma2, target_rng, 0));
    if (has_source) {
        Rng source_rng(derive_seed(cfg.seed, {r, 2}));
        const Eigen::Index source_n = cfg.fresh_halves ? 2 * n1 : n1;
        sets.push_back(generate(cfg.setting, cfg.tau_source, source_n, sigma2, source_rng, 1));
    }
    return ReplicationData{MultiSourceData(std::move(sets)), derive_seed(cfg.seed, {r, 3}),
                           derive_seed(cfg.seed, {r, 4})};
}

FittedRegressor target_only_fit(const SampleSet& target, Eigen::Index n0, const ExperimentConfig& cfg) {
    const auto spec = simulation_kernel(cfg.setting);
    const SampleSet t = head(target, n0);
    const double lambda =
        cfg.lambda_policy == LambdaPolicy::Fixed ? cfg.fixed_lambda : gcv_on(t, spec, cfg.lambda_grid);
    return KernelRidge(t.xs, spec).fit(t.ys, lambda);
}

double choose_lambda(const MultiSourceData& data, const KernelSpec& spec, const ExperimentConfig& cfg) {
    switch (cfg.lambda_policy) {
        case LambdaPolicy::Fixed:
            return cfg.fixed_lambda;
        case LambdaPolicy::TargetGcv:
            return gcv_on(data.target(), spec, cfg.lambda_grid);
        case LambdaPolicy::PooledGcv:
            return KernelRidge(data.pooled_xs(), spec).select_lambda(data.pooled_ys(), cfg.lambda_grid);
    }
    throw ConfigError("unknown lambda policy");
}

ExperimentReport run_mise_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto spec = simulation_kernel(cfg.setting);
    const double sigma2 = snr_sigma2(cfg.setting, 0.0);
    std::vector<double> ratios = cfg.ratios;
    std::sort(ratios.begin(), ratios.end());
    const std::size_t reps = static_cast<std::size_t>(cfg.reps);
    std::vector<double> ises(ratios.size() * reps);
    std::vector<double> lambdas(ratios.size() * reps);

    parallel_for(ises.size(), cfg.threads, [&](std::size_t cell) {
        const std::size_t k = cell / reps;
        const int rep = static_cast<int>(cell % reps);
        const auto rd = replication_data(cfg, rep, ratios[k], sigma2);
        const auto stage = final_stage(cfg, rd, spec);
        const auto model = KernelRidge(stage.design, spec).fit(stage.ys, stage.lambda);
        ises[cell] = ise(model, cfg.setting, 0.0, cfg.ise_grid_size);
        lambdas[cell] = std::log10(stage.lambda);
    });

    ExperimentReport report;
    for (std::size_t k = 0; k < ratios.size(); ++k) {
        const auto slice = [&](const std::vector<double>& v) {
            return std::vector<double>(v.begin() + static_cast<std::ptrdiff_t>(k * reps),
                                       v.begin() + static_cast<std::ptrdiff_t>((k + 1) * reps));
        };
        report.rows.push_back(make_row(cfg, ratios[k], "mise", summarize(slice(ises))));
        report.rows.push_back(make_row(cfg, ratios[k], "log10_lambda", summarize(slice(lambdas))));
    }
    return report;
}

ExperimentReport run_coverage_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    if (cfg.B < 50) throw ConfigError("coverage experiments need B >= 50");
    const auto spec = simulation_kernel(cfg.setting);
    const double sigma2 = snr_sigma2(cfg.setting, 0.0);
    std::vector<double> ratios = cfg.ratios;
    std::sort(ratios.begin(), ratios.end());
    const std::size_t reps = static_cast<std::size_t>(cfg.reps);
    const PointMatrix grid = uniform_grid(cfg.setting.dim(), cfg.eval_grid_size);
    const Vector grid_truth = truth_on(cfg.setting, 0.0, grid);
    const auto g = static_cast<std::size_t>(grid.rows());

    std::vector<bool> interior(g, true);
    for (Eigen::Index i = 0; i < grid.rows(); ++i)
        for (Eigen::Index j = 0; j < grid.cols(); ++j)
            if (grid(i, j) <= 0.0 || grid(i, j) >= 1.0) interior[static_cast<std::size_t>(i)] = false;

    struct Cell {
        std::vector<double> covered;  // 0/1 per grid point
        double region = 0.0;
        double width = 0.0;
    };
    std::vector<Cell> cells(ratios.size() * reps);

    parallel_for(cells.size(), cfg.threads, [&](std::size_t cell) {
        const std::size_t k = cell / reps;
        const int rep = static_cast<int>(cell % reps);
        const auto rd = replication_data(cfg, rep, ratios[k], sigma2);
        const auto stage = final_stage(cfg, rd, spec);
        KernelRidge solver(stage.design, spec);
        EnsembleOptions eo;
        eo.replicates = cfg.B;
        eo.mode = stage.mode;
        eo.seed = rd.multiplier_seed;
        const auto ens = bootstrap_on_design(solver, stage.ys, stage.lambda, stage.mode, eo);
        const auto cis = pointwise_cis(ens, grid, cfg.alpha);
        Cell out;
        out.covered.resize(g);
        double width = 0.0;
        std::size_t n_in = 0;
        for (std::size_t i = 0; i < g; ++i) {
            out.covered[i] = cis[i].contains(grid_truth[static_cast<Eigen::Index>(i)]) ? 1.0 : 0.0;
            if (interior[i]) {
                width += cis[i].upper - cis[i].lower;
                ++n_in;
            }
        }
        out.width = n_in > 0 ? width / static_cast<double>(n_in) : 0.0;
        const auto region = global_region(ens, cfg.alpha);
        const Vector truth_design = truth_on(cfg.setting, 0.0, ens.design());
        const Vector base_design = ens.base_design_values();
        out.region = region_contains(region, std::span<const double>(truth_design.data(), truth_design.size()),
                                     std::span<const double>(base_design.data(), base_design.size()))
                         ? 1.0
                         : 0.0;
        cells[cell] = std::move(out);
    });

    ExperimentReport report;
    for (std::size_t k = 0; k < ratios.size(); ++k) {
        const auto begin = cells.begin() + static_cast<std::ptrdiff_t>(k * reps);
        std::vector<double> per_rep_mean;
        std::vector<double> region;
        std::vector<double> width;
        for (auto it = begin; it != begin + static_cast<std::ptrdiff_t>(reps); ++it) {
            double s = 0.0;
            std::size_t n_in = 0;
            for (std::size_t i = 0; i < g; ++i)
                if (interior[i]) {
                    s += it->covered[i];
                    ++n_in;
                }
            per_rep_mean.push_back(n_in > 0 ? s / static_cast<double>(n_in) : 0.0);
            region.push_back(it->region);
            width.push_back(it->width);
        }
        double min_cov = 1.0;
        std::vector<ReportRow> point_rows;
        for (std::size_t i = 0; i < g; ++i) {
            std::vector<double> v;
            v.reserve(reps);
            for (auto it = begin; it != begin + static_cast<std::ptrdiff_t>(reps); ++it) v.push_back(it->covered[i]);
            const auto s = summarize(v);
            if (interior[i]) min_cov = std::min(min_cov, s.mean);
            std::string label = "coverage[x=";
            for (Eigen::Index j = 0; j < grid.cols(); ++j) {
                if (j > 0) label += ';';
                label += fmt_coord(grid(static_cast<Eigen::Index>(i), j));
            }
            label += ']';
            point_rows.push_back(make_row(cfg, ratios[k], label, s));
        }
        report.rows.push_back(make_row(cfg, ratios[k], "coverage_mean", summarize(per_rep_mean)));
        report.rows.push_back(make_row(cfg, ratios[k], "coverage_min", Summary{min_cov, 0.0}));
        report.rows.push_back(make_row(cfg, ratios[k], "region_coverage", summarize(region)));
        report.rows.push_back(make_row(cfg, ratios[k], "ci_width_mean", summarize(width)));
        for (auto& r : point_rows) report.rows.push_back(std::move(r));
    }
    return report;
}

ExperimentReport run_rate_experiment(const SimSetting& setting, const std::vector<int>& sizes, int reps,
                                     std::uint64_t seed, const std::vector<double>& lambda_grid, int threads) {
    if (sizes.empty()) throw ConfigError("rate experiment needs sample sizes");
    if (reps < 1) throw ConfigError("reps must be >= 1");
    if (lambda_grid.empty()) throw ConfigError("lambda grid is empty");
    const auto spec = simulation_kernel(setting);
    const double sigma2 = snr_sigma2(setting, 0.0);
    const auto r = static_cast<std::size_t>(reps);
    std::vector<double> ises(sizes.size() * r);
    std::vector<double> lambdas(sizes.size() * r);
    // Largest problems first so the pool does not finish on a long tail.
    std::vector<std::size_t> order(ises.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return sizes[a / r] > sizes[b / r]; });
    parallel_for(order.size(), threads, [&](std::size_t slot) {
        const std::size_t cell = order[slot];
        const int n = sizes[cell / r];
        const auto rep = static_cast<std::uint64_t>(cell % r);
        if (n < 2) throw ConfigError("rate experiment sizes must be >= 2");
        Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(n), rep, 1}));
        const SampleSet s = generate(setting, 0.0, n, sigma2, rng, 0);
        KernelRidge solver(s.xs, spec);
        const double lambda = solver.select_lambda(s.ys, lambda_grid);
        ises[cell] = ise(solver.fit(s.ys, lambda), setting, 0.0);
        lambdas[cell] = std::log10(lambda);
    });
    ExperimentReport report;
    for (std::size_t k = 0; k < sizes.size(); ++k) {
        const auto b = static_cast<std::ptrdiff_t>(k * r);
        const auto e = static_cast<std::ptrdiff_t>((k + 1) * r);
        const auto mise = summarize(std::vector<double>(ises.begin() + b, ises.begin() + e));
        const auto lam = summarize(std::vector<double>(lambdas.begin() + b, lambdas.begin() + e));
        report.rows.push_back(ReportRow{setting.name(), 0.0, sizes[k], 0.0, "mise", mise.mean, mise.stderr_, reps, seed});
        report.rows.push_back(
            ReportRow{setting.name(), 0.0, sizes[k], 0.0, "log10_lambda", lam.mean, lam.stderr_, reps, seed});
    }
    return report;
}

}  // namespace inpr
