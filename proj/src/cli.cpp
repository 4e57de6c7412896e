#include "inpr/cli.hpp"

#include "inpr/bootstrap.hpp"
#include "inpr/csv_io.hpp"
#include "inpr/diagnostics.hpp"
#include "inpr/error.hpp"
#include "inpr/parallel.hpp"
#include "inpr/simlab.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

namespace inpr::cli {

using nlohmann::json;

std::string version() { return INPR_VERSION; }

namespace {

json to_json(const RunConfig& c) {
    json j;
    j["input"] = c.input;
    j["seed"] = c.seed;
    j["threads"] = c.threads;
    j["kernel"] = c.kernel;
    j["exp_scale"] = c.exp_scale;
    j["exp_exponent"] = c.exp_exponent;
    j["mode"] = c.mode;
    j["shuffle"] = c.shuffle;
    j["lambda"] = c.lambda ? json(*c.lambda) : json(nullptr);
    j["lambda_grid"] = c.lambda_grid;
    j["grid"] = c.grid;
    j["alpha"] = c.alpha;
    j["B"] = c.B;
    j["curve"] = c.curve;
    j["setting"] = c.setting;
    j["snr"] = c.snr;
    j["n0"] = c.n0;
    j["ratios"] = c.ratios;
    j["tau"] = c.tau;
    j["reps"] = c.reps;
    j["lambda_policy"] = c.lambda_policy;
    j["fresh_halves"] = c.fresh_halves;
    j["eval_grid"] = c.eval_grid;
    j["ise_grid"] = c.ise_grid;
    j["sizes"] = c.sizes;
    j["beta"] = c.beta;
    j["dim"] = c.dim;
    j["slack"] = c.slack;
    j["truncation"] = c.truncation;
    j["sample_sizes"] = c.sample_sizes;
    return j;
}

template <class T>
void take(const json& j, const char* key, T& dst) {
    if (!j.contains(key)) return;
    try {
        dst = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
}

void apply_json(const json& j, RunConfig& c) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    static const std::vector<std::string> known{
        "input", "out",      "seed",  "threads",    "kernel",       "exp_scale",     "exp_exponent", "mode",
        "shuffle", "lambda", "lambda_grid", "grid", "alpha",        "B",             "curve",        "setting",
        "snr",   "n0",       "ratios", "tau",       "reps",         "lambda_policy", "fresh_halves", "eval_grid",
        "ise_grid", "sizes", "beta",  "dim",        "slack",        "truncation",    "sample_sizes"};
    for (const auto& [key, _] : j.items())
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw ConfigError("unknown config key '" + key + "'");
    take(j, "input", c.input);
    take(j, "out", c.out);
    take(j, "seed", c.seed);
    take(j, "threads", c.threads);
    take(j, "kernel", c.kernel);
    take(j, "exp_scale", c.exp_scale);
    take(j, "exp_exponent", c.exp_exponent);
    take(j, "mode", c.mode);
    take(j, "shuffle", c.shuffle);
    if (j.contains("lambda")) {
        if (j["lambda"].is_null())
            c.lambda.reset();
        else {
            double v = 0.0;
            take(j, "lambda", v);
            c.lambda = v;
        }
    }
    take(j, "lambda_grid", c.lambda_grid);
    take(j, "grid", c.grid);
    take(j, "alpha", c.alpha);
    take(j, "B", c.B);
    take(j, "curve", c.curve);
    take(j, "setting", c.setting);
    take(j, "snr", c.snr);
    take(j, "n0", c.n0);
    take(j, "ratios", c.ratios);
    take(j, "tau", c.tau);
    take(j, "reps", c.reps);
    take(j, "lambda_policy", c.lambda_policy);
    take(j, "fresh_halves", c.fresh_halves);
    take(j, "eval_grid", c.eval_grid);
    take(j, "ise_grid", c.ise_grid);
    take(j, "sizes", c.sizes);
    take(j, "beta", c.beta);
    take(j, "dim", c.dim);
    take(j, "slack", c.slack);
    take(j, "truncation", c.truncation);
    take(j, "sample_sizes", c.sample_sizes);
}

/// Flag values; unset optionals leave the config untouched.
struct Flags {
    std::string config;
    std::optional<std::string> input, out, kernel, mode, curve, setting, lambda_policy;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads, grid, B, n0, reps, eval_grid, ise_grid, dim;
    std::optional<double> exp_scale, exp_exponent, lambda, alpha, snr, tau, beta, slack;
    std::optional<long> truncation;
    std::optional<bool> shuffle, fresh_halves;
    std::vector<double> lambda_grid, ratios;
    std::vector<int> sizes;
    std::vector<long> sample_sizes;
};

template <class T>
void over(const std::optional<T>& src, T& dst) {
    if (src) dst = *src;
}

void apply_flags(const Flags& f, RunConfig& c) {
    over(f.input, c.input);
    over(f.out, c.out);
    over(f.kernel, c.kernel);
    over(f.mode, c.mode);
    over(f.curve, c.curve);
    over(f.setting, c.setting);
    over(f.lambda_policy, c.lambda_policy);
    over(f.seed, c.seed);
    over(f.threads, c.threads);
    over(f.grid, c.grid);
    over(f.B, c.B);
    over(f.n0, c.n0);
    over(f.reps, c.reps);
    over(f.eval_grid, c.eval_grid);
    over(f.ise_grid, c.ise_grid);
    over(f.dim, c.dim);
    over(f.exp_scale, c.exp_scale);
    over(f.exp_exponent, c.exp_exponent);
    if (f.lambda) c.lambda = f.lambda;
    over(f.alpha, c.alpha);
    over(f.snr, c.snr);
    over(f.tau, c.tau);
    over(f.beta, c.beta);
    over(f.slack, c.slack);
    over(f.truncation, c.truncation);
    over(f.shuffle, c.shuffle);
    over(f.fresh_halves, c.fresh_halves);
    if (!f.lambda_grid.empty()) c.lambda_grid = f.lambda_grid;
    if (!f.ratios.empty()) c.ratios = f.ratios;
    if (!f.sizes.empty()) c.sizes = f.sizes;
    if (!f.sample_sizes.empty()) c.sample_sizes = f.sample_sizes;
}

void add_common(CLI::App* s, Flags& f) {
    s->add_option("--config", f.config, "JSON config or manifest.json of an earlier run");
    s->add_option("--out", f.out, "Output directory");
    s->add_option("--seed", f.seed, "Master seed");
    s->add_option("--threads", f.threads, "Worker threads (default: INPR_THREADS or hardware)");
}

void add_estimation(CLI::App* s, Flags& f) {
    s->add_option("--input", f.input, "CSV with header source_id,x1[,...],y");
    s->add_option("--kernel", f.kernel, "sobolev2 | exp");
    s->add_option("--exp-scale", f.exp_scale, "Exponential kernel length scale");
    s->add_option("--exp-exponent", f.exp_exponent, "Exponential kernel exponent in (0, 2]");
    s->add_option("--mode", f.mode, "cs (covariate shift) | ds (distribution shift)");
    s->add_option("--shuffle", f.shuffle, "Shuffle before halving in ds mode (true/false)");
    s->add_option("--lambda", f.lambda, "Smoothing parameter; GCV when omitted");
    s->add_option("--lambda-grid", f.lambda_grid, "Comma-separated GCV grid")->delimiter(',');
    s->add_option("--grid", f.grid, "Evaluation points per axis");
}

void add_bootstrap(CLI::App* s, Flags& f) {
    s->add_option("--alpha", f.alpha, "Miscoverage level");
    s->add_option("--B", f.B, "Bootstrap replicates");
}

void add_experiment(CLI::App* s, Flags& f) {
    s->add_option("--setting", f.setting, "setting1 | setting2");
    s->add_option("--snr", f.snr, "Signal-to-noise ratio");
    s->add_option("--n0", f.n0, "Target sample size");
    s->add_option("--ratios", f.ratios, "Comma-separated source/target size ratios")->delimiter(',');
    s->add_option("--tau", f.tau, "Source phase shift in [0, 0.5]");
    s->add_option("--reps", f.reps, "Monte Carlo replications");
    s->add_option("--lambda", f.lambda, "Fixed smoothing parameter (overrides the policy)");
    s->add_option("--lambda-grid", f.lambda_grid, "Comma-separated GCV grid")->delimiter(',');
    s->add_option("--lambda-policy", f.lambda_policy, "target | pooled | fixed");
    s->add_option("--fresh-halves", f.fresh_halves, "Draw 2 n_m points per set before halving (true/false)");
    s->add_option("--shuffle", f.shuffle, "Shuffle before halving (true/false)");
    s->add_option("--ise-grid", f.ise_grid, "ISE midpoints per axis (0 = default)");
}

void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream os(p, std::ios::binary | std::ios::trunc);
    if (!os) throw InputError("cannot write " + p.string());
    os << text;
    if (!os) throw InputError("failed writing " + p.string());
}

class Artifacts {
public:
    Artifacts(const RunConfig& cfg) : dir_(cfg.out) {
        for (const auto& p : {cfg.input, cfg.curve})
            if (!p.empty() && std::filesystem::exists(p)) inputs_.push_back(std::filesystem::weakly_canonical(p));
        std::filesystem::create_directories(dir_);
    }

    void write(const std::string& name, const std::string& text) {
        const auto p = dir_ / name;
        const auto canon = std::filesystem::weakly_canonical(p);
        for (const auto& in : inputs_)
            if (canon == in) throw ConfigError("refusing to overwrite input file " + in.string());
        write_text(p, text);
    }

private:
    std::filesystem::path dir_;
    std::vector<std::filesystem::path> inputs_;
};

std::string dump(const json& j) { return j.dump(2) + "\n"; }

KernelSpec make_kernel(const RunConfig& c, int dim) {
    if (c.kernel == "sobolev2") return KernelSpec::periodic_sobolev(2, dim);
    if (c.kernel == "exp") return KernelSpec::exponential(c.exp_scale, c.exp_exponent, dim);
    throw ConfigError("unknown kernel '" + c.kernel + "' (expected sobolev2 or exp)");
}

ShiftMode make_mode(const RunConfig& c) {
    if (c.mode == "cs") return ShiftMode::Covariate;
    if (c.mode == "ds") return ShiftMode::Distribution;
    throw ConfigError("unknown mode '" + c.mode + "' (expected cs or ds)");
}

std::vector<double> lambda_grid(const RunConfig& c) { return c.lambda_grid.empty() ? log_grid() : c.lambda_grid; }

SimSetting make_setting(const RunConfig& c) {
    SimSetting s;
    if (c.setting == "setting1")
        s.kind = SettingKind::Setting1;
    else if (c.setting == "setting2")
        s.kind = SettingKind::Setting2;
    else
        throw ConfigError("unknown setting '" + c.setting + "' (expected setting1 or setting2)");
    s.snr = c.snr;
    return s;
}

/// Grid over [0,1]^d for the periodic kernel, over the data's bounding box otherwise.
PointMatrix evaluation_grid(const RunConfig& c, const MultiSourceData& data, const KernelSpec& spec) {
    PointMatrix g = uniform_grid(data.dim(), c.grid);
    if (spec.is_periodic_sobolev()) return g;
    const PointMatrix xs = data.pooled_xs();
    for (Eigen::Index j = 0; j < g.cols(); ++j) {
        const double lo = xs.col(j).minCoeff();
        const double hi = xs.col(j).maxCoeff();
        g.col(j) = (g.col(j).array() * (hi - lo) + lo).matrix();
    }
    return g;
}

/// Explicit lambda, else GCV on the pooled unit-weight data (both modes).
double resolve_lambda(const RunConfig& c, const MultiSourceData& data, const KernelSpec& spec) {
    if (c.lambda) {
        check_lambda(*c.lambda);
        return *c.lambda;
    }
    return KernelRidge(data.pooled_xs(), spec).select_lambda(data.pooled_ys(), lambda_grid(c));
}

MultiSourceData load_input(const RunConfig& c) {
    if (c.input.empty()) throw ConfigError("--input is required for " + c.command);
    return ingest_csv(c.input);
}

EnsembleOptions ensemble_options(const RunConfig& c) {
    EnsembleOptions o;
    o.replicates = c.B;
    o.mode = make_mode(c);
    o.seed = c.seed;
    o.shuffle = c.shuffle;
    o.threads = c.threads;
    return o;
}

json data_summary(const MultiSourceData& data) {
    json sizes = json::array();
    for (const auto& s : data.sets()) sizes.push_back({{"source_id", s.source_id}, {"n", s.size()}});
    return json{{"dim", data.dim()}, {"sets", sizes}, {"total", data.total_size()}};
}

std::string curve_csv(const CurveTable& t) {
    std::ostringstream os;
    write_curve_csv(os, t);
    return os.str();
}

void cmd_fit(const RunConfig& c, Artifacts& art, json& summary) {
    const auto data = load_input(c);
    const auto spec = make_kernel(c, data.dim());
    const double lambda = resolve_lambda(c, data, spec);
    const auto model = make_mode(c) == ShiftMode::Covariate
                           ? fit_covariate_shift(data, lambda, spec)
                           : fit_distribution_shift(data, WeightVector::ones(second_half_total(data)), lambda, spec,
                                                    c.seed, DistributionShiftOptions{c.shuffle, false});
    CurveTable t;
    t.xs = evaluation_grid(c, data, spec);
    t.estimate = model.predict(t.xs);
    if (!t.estimate.allFinite()) throw NumericalError("fitted curve has non-finite values");
    art.write("curve.csv", curve_csv(t));
    summary["lambda"] = lambda;
    summary["data"] = data_summary(data);
}

void cmd_ci(const RunConfig& c, Artifacts& art, json& summary) {
    const auto data = load_input(c);
    const auto spec = make_kernel(c, data.dim());
    const double lambda = resolve_lambda(c, data, spec);
    const auto ens = bootstrap_ensemble(data, lambda, spec, ensemble_options(c));
    CurveTable t;
    t.xs = evaluation_grid(c, data, spec);
    t.estimate = ens.base().predict(t.xs);
    const auto cis = pointwise_cis(ens, t.xs, c.alpha);
    t.lower = Vector(t.xs.rows());
    t.upper = Vector(t.xs.rows());
    for (std::size_t i = 0; i < cis.size(); ++i) {
        (*t.lower)[static_cast<Eigen::Index>(i)] = cis[i].lower;
        (*t.upper)[static_cast<Eigen::Index>(i)] = cis[i].upper;
    }
    art.write("ci.csv", curve_csv(t));
    summary["lambda"] = lambda;
    summary["data"] = data_summary(data);
}

/// Values of a tabulated curve at the design: linear interpolation in d = 1,
/// exact coordinate matches otherwise.
Vector curve_on_design(const CurveTable& curve, const PointMatrix& design) {
    if (curve.xs.cols() != design.cols()) throw ShapeError("curve dimension does not match the data");
    Vector out(design.rows());
    if (design.cols() == 1) {
        std::vector<std::pair<double, double>> pts;
        for (Eigen::Index i = 0; i < curve.xs.rows(); ++i) pts.emplace_back(curve.xs(i, 0), curve.estimate[i]);
        std::sort(pts.begin(), pts.end());
        for (Eigen::Index i = 0; i < design.rows(); ++i) {
            const double x = design(i, 0);
            auto hi = std::lower_bound(pts.begin(), pts.end(), std::make_pair(x, -std::numeric_limits<double>::infinity()));
            if (hi == pts.begin()) {
                out[i] = pts.front().second;
            } else if (hi == pts.end()) {
                out[i] = pts.back().second;
            } else {
                const auto lo = hi - 1;
                const double t = hi->first == lo->first ? 0.0 : (x - lo->first) / (hi->first - lo->first);
                out[i] = lo->second + t * (hi->second - lo->second);
            }
        }
        return out;
    }
    std::map<std::vector<double>, double> table;
    for (Eigen::Index i = 0; i < curve.xs.rows(); ++i) {
        const Point r = row_of(curve.xs, i);
        table[std::vector<double>(r.begin(), r.end())] = curve.estimate[i];
    }
    for (Eigen::Index i = 0; i < design.rows(); ++i) {
        const Point r = row_of(design, i);
        const auto it = table.find(std::vector<double>(r.begin(), r.end()));
        if (it == table.end()) throw InputError("curve has no value at design point " + std::to_string(i));
        out[i] = it->second;
    }
    return out;
}

void cmd_region(const RunConfig& c, Artifacts& art, json& summary) {
    const auto data = load_input(c);
    const auto spec = make_kernel(c, data.dim());
    const double lambda = resolve_lambda(c, data, spec);
    const auto ens = bootstrap_ensemble(data, lambda, spec, ensemble_options(c));
    const auto region = global_region(ens, c.alpha);
    CurveTable t;
    t.xs = ens.design();
    t.estimate = ens.base_design_values();
    art.write("region_center.csv", curve_csv(t));
    summary["lambda"] = lambda;
    summary["radius"] = region.radius;
    summary["design_size"] = t.xs.rows();
    if (!c.curve.empty()) {
        std::ifstream in(c.curve);
        if (!in) throw InputError("cannot open " + c.curve);
        const Vector f = curve_on_design(read_curve_csv(in), t.xs);
        const Vector diff = f - t.estimate;
        summary["curve_distance"] = empirical_norm(diff);
        summary["contains_curve"] = region_contains(region, {f.data(), static_cast<std::size_t>(f.size())},
                                                    {t.estimate.data(), static_cast<std::size_t>(t.estimate.size())});
    }
    summary["data"] = data_summary(data);
}

ExperimentConfig experiment_config(const RunConfig& c) {
    ExperimentConfig e;
    e.setting = make_setting(c);
    e.n0 = c.n0;
    e.ratios = c.ratios;
    e.tau_source = c.tau;
    e.B = c.B;
    e.reps = c.reps;
    e.seed = c.seed;
    e.lambda_grid = lambda_grid(c);
    e.eval_grid_size = c.eval_grid;
    e.ise_grid_size = c.ise_grid;
    e.alpha = c.alpha;
    e.lambda_policy = lambda_policy_from_string(c.lambda_policy);
    if (c.lambda) {
        e.lambda_policy = LambdaPolicy::Fixed;
        e.fixed_lambda = *c.lambda;
    }
    e.fresh_halves = c.fresh_halves;
    e.shuffle = c.shuffle;
    e.threads = c.threads;
    return e;
}

std::string report_csv(const ExperimentReport& r) {
    std::ostringstream os;
    r.write_csv(os);
    return os.str();
}

void cmd_simulate(const RunConfig& c, Artifacts& art, json&) {
    art.write("report.csv", report_csv(run_mise_experiment(experiment_config(c))));
}

void cmd_coverage(const RunConfig& c, Artifacts& art, json&) {
    art.write("coverage.csv", report_csv(run_coverage_experiment(experiment_config(c))));
}

void cmd_rate(const RunConfig& c, Artifacts& art, json& summary) {
    const auto setting = make_setting(c);
    const auto report = run_rate_experiment(setting, c.sizes, c.reps, c.seed, lambda_grid(c), c.threads);
    art.write("rate.csv", report_csv(report));
    std::vector<std::pair<double, double>> pts;
    for (const auto& row : report.rows)
        if (row.statistic == "mise") pts.emplace_back(row.n0, row.value);
    if (pts.size() >= 3) summary["slope"] = rate_slope(pts);
}

void cmd_diagnose(const RunConfig& c, Artifacts& art, json& summary) {
    std::vector<long> sizes = c.sample_sizes;
    int dim = c.dim;
    if (!c.input.empty()) {
        const auto data = ingest_csv(c.input);
        sizes.clear();
        for (const auto& s : data.sets()) sizes.push_back(static_cast<long>(s.size()));
        dim = data.dim();
    }
    if (c.lambda) {
        SpectralModel model;
        model.law = PolynomialLaw{c.beta, dim};
        model.truncation = c.truncation;
        summary["effective_dimension"] = effective_dimension(*c.lambda, model);
    }
    const auto e = balance_exponent(c.beta, dim);
    summary["balance_exponent"] = e.exponent;
    summary["balance_exponent_valid"] = e.valid;
    if (!e.note.empty()) summary["balance_note"] = e.note;
    if (!sizes.empty()) {
        const auto adv = balance_check(sizes, c.beta, dim, c.slack);
        summary["balance"] = json{{"total", adv.total},        {"threshold", adv.threshold},
                                  {"passes", adv.passes},      {"flagged", adv.flagged},
                                  {"heuristic", adv.heuristic}, {"slack", c.slack}};
    }
    art.write("diagnose.json", dump(summary));
}

}  // namespace

void execute(const RunConfig& cfg, std::ostream& log) {
    if (cfg.threads < 1) throw ConfigError("threads must be >= 1");
    if (cfg.out.empty()) throw ConfigError("--out must not be empty");
    Artifacts art(cfg);
    json summary;
    if (cfg.command == "fit")
        cmd_fit(cfg, art, summary);
    else if (cfg.command == "ci")
        cmd_ci(cfg, art, summary);
    else if (cfg.command == "region")
        cmd_region(cfg, art, summary);
    else if (cfg.command == "simulate")
        cmd_simulate(cfg, art, summary);
    else if (cfg.command == "coverage")
        cmd_coverage(cfg, art, summary);
    else if (cfg.command == "rate-check")
        cmd_rate(cfg, art, summary);
    else if (cfg.command == "diagnose")
        cmd_diagnose(cfg, art, summary);
    else
        throw ConfigError("unknown command '" + cfg.command + "'");
    if (!summary.is_null() && cfg.command != "diagnose") art.write("summary.json", dump(summary));

    json manifest;
    manifest["tool"] = "inpr";
    manifest["version"] = version();
    manifest["command"] = cfg.command;
    manifest["seed"] = cfg.seed;
    manifest["config"] = to_json(cfg);
    art.write("manifest.json", dump(manifest));
    log << "wrote " << cfg.command << " artifacts to " << cfg.out << '\n';
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Kernel ridge estimators under covariate and distribution shift", "inpr"};
    app.set_version_flag("--version", version());
    app.require_subcommand(1);
    Flags f;
    std::map<std::string, CLI::App*> subs;
    subs["fit"] = app.add_subcommand("fit", "Fit a covariate- or distribution-shift estimate on a grid");
    subs["ci"] = app.add_subcommand("ci", "Pointwise multiplier-bootstrap confidence intervals");
    subs["region"] = app.add_subcommand("region", "Global confidence region radius and membership test");
    subs["simulate"] = app.add_subcommand("simulate", "MISE experiment across source/target ratios");
    subs["coverage"] = app.add_subcommand("coverage", "Coverage experiment for intervals and regions");
    subs["rate-check"] = app.add_subcommand("rate-check", "Target-only MISE across sample sizes");
    subs["diagnose"] = app.add_subcommand("diagnose", "Effective dimension and sample-balance advisory");
    for (auto& [name, s] : subs) add_common(s, f);
    for (const char* n : {"fit", "ci", "region"}) add_estimation(subs[n], f);
    for (const char* n : {"ci", "region", "coverage"}) add_bootstrap(subs[n], f);
    subs["region"]->add_option("--curve", f.curve, "CSV x1[,...],value to test for membership");
    add_experiment(subs["simulate"], f);
    add_experiment(subs["coverage"], f);
    subs["coverage"]->add_option("--eval-grid", f.eval_grid, "Coverage grid points per axis");
    auto* rate = subs["rate-check"];
    rate->add_option("--setting", f.setting, "setting1 | setting2");
    rate->add_option("--snr", f.snr, "Signal-to-noise ratio");
    rate->add_option("--sizes", f.sizes, "Comma-separated sample sizes")->delimiter(',');
    rate->add_option("--reps", f.reps, "Monte Carlo replications per size");
    rate->add_option("--lambda-grid", f.lambda_grid, "Comma-separated GCV grid")->delimiter(',');
    auto* diag = subs["diagnose"];
    diag->add_option("--input", f.input, "CSV whose set sizes feed the balance advisory");
    diag->add_option("--lambda", f.lambda, "Smoothing parameter for the effective dimension");
    diag->add_option("--beta", f.beta, "Smoothness beta of the polynomial eigenvalue law");
    diag->add_option("--dim", f.dim, "Input dimension");
    diag->add_option("--slack", f.slack, "Multiplier on the balance threshold");
    diag->add_option("--truncation", f.truncation, "Spectral truncation");
    diag->add_option("--sample-sizes", f.sample_sizes, "Comma-separated n_0,...,n_M")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        RunConfig cfg;
        for (const auto& [name, s] : subs)
            if (s->parsed()) cfg.command = name;
        cfg.threads = default_thread_count();
        if (!f.config.empty()) {
            std::ifstream in(f.config);
            if (!in) throw InputError("cannot open config " + f.config);
            json j;
            try {
                j = json::parse(in);
            } catch (const json::parse_error& e) {
                throw InputError("config " + f.config + ": " + e.what());
            }
            if (j.contains("config") && j.contains("command")) {
                if (j["command"].get<std::string>() != cfg.command)
                    throw ConfigError("manifest was written by '" + j["command"].get<std::string>() + "', not '" +
                                      cfg.command + "'");
                j = j["config"];
            }
            apply_json(j, cfg);
        }
        apply_flags(f, cfg);
        execute(cfg, out);
        return 0;
    } catch (const Error& e) {
        err << "inpr " << (argc > 1 ? argv[1] : "") << ": " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "inpr: unexpected failure: " << e.what() << '\n';
        return 3;
    }
}

}  // namespace inpr::cli
