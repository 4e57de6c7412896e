#include "inpr/cli.hpp"
#include "inpr/csv_io.hpp"
#include "inpr/error.hpp"
#include "inpr/simlab.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace inpr;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("inpr_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void spit(const std::string& p, const std::string& text) {
    std::ofstream os(p, std::ios::binary);
    os << text;
}

int run(std::vector<std::string> args, std::string* err_text = nullptr) {
    args.insert(args.begin(), "inpr");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int rc = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    if (err_text) *err_text = err.str();
    return rc;
}

MultiSourceData parse(const std::string& text) {
    std::istringstream in(text);
    return read_multisource_csv(in);
}

const std::string kTwoRow = "source_id,x1,y\n0,0.5,1.0\n1,0.25,2.0\n";

}  // namespace

TEST_CASE("csv ingestion") {
    const auto d = parse(kTwoRow);
    REQUIRE(d.set_count() == 2);
    CHECK(d.target().xs(0, 0) == 0.5);
    CHECK(d.target().ys[0] == 1.0);
    CHECK(d.set(1).source_id == 1);
    CHECK(d.set(1).xs(0, 0) == 0.25);
    CHECK(d.set(1).ys[0] == 2.0);

    const auto grouped = parse("source_id,x1,x2,y\n2,0.1,0.2,3\n0,0.3,0.4,5\r\n2,0.5,0.6,7\n\n0,0.7,0.8,9\n");
    CHECK(grouped.dim() == 2);
    CHECK(grouped.target().ys == Eigen::Vector2d(5, 9));
    CHECK(grouped.set(1).source_id == 2);
    CHECK(grouped.set(1).xs(1, 1) == 0.6);
}

TEST_CASE("csv ingestion errors") {
    try {
        parse("source_id,x1,y\n1,0.5,1.0\n");
        FAIL("expected an error");
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).find("target") != std::string::npos);
    }
    try {
        parse("source_id,x1,y\n0,0.5,1.0\n0,0.5\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
        CHECK(std::string(e.what()).rfind("line 3:", 0) == 0);
    }
    CHECK_THROWS_AS(parse("source_id,x1,y\n0,abc,1.0\n"), ParseError);
    CHECK_THROWS_AS(parse("source_id,x1,y\n0,0.5,1.0x\n"), ParseError);
    CHECK_THROWS_AS(parse("source_id,x1,y\nq,0.5,1.0\n"), ParseError);
    CHECK_THROWS_AS(parse("id,x1,y\n0,0.5,1.0\n"), ParseError);
    CHECK_THROWS_AS(parse("source_id,x2,y\n0,0.5,1.0\n"), ParseError);
    CHECK_THROWS_AS(parse(""), InputError);
    CHECK_THROWS_AS(ingest_csv("/nonexistent/file.csv"), InputError);
}

TEST_CASE("csv round trip is exact") {
    Rng rng(4);
    const SimSetting s{SettingKind::Setting2, 10.0};
    const MultiSourceData d({generate(s, 0.0, 25, 0.3, rng, 0), generate(s, 0.2, 17, 0.3, rng, 3)});
    std::ostringstream os;
    write_multisource_csv(os, d);
    CHECK(parse(os.str()) == d);
}

TEST_CASE("fit smoke test on the two-row file") {
    TempDir tmp;
    spit(tmp / "two.csv", kTwoRow);
    REQUIRE(run({"fit", "--input", tmp / "two.csv", "--lambda", "0.1", "--out", tmp / "fit"}) == 0);
    std::istringstream in(slurp(tmp / "fit/curve.csv"));
    const auto curve = read_curve_csv(in);
    CHECK(curve.xs.rows() == 101);
    CHECK(curve.estimate.allFinite());
    CHECK(fs::exists(tmp / "fit/manifest.json"));
    CHECK(slurp(tmp / "two.csv") == kTwoRow);
}

TEST_CASE("manifests record the resolved config and reproduce runs") {
    TempDir tmp;
    const std::vector<std::string> args{"simulate", "--reps", "1", "--n0", "30", "--ratios", "0,1",
                                        "--seed", "7", "--ise-grid", "100", "--lambda-grid", "1e-6,1e-4,1e-2"};
    auto a = args;
    a.insert(a.end(), {"--out", tmp / "a"});
    auto b = args;
    b.insert(b.end(), {"--out", tmp / "b"});
    REQUIRE(run(a) == 0);
    REQUIRE(run(b) == 0);
    CHECK(slurp(tmp / "a/report.csv") == slurp(tmp / "b/report.csv"));
    CHECK(slurp(tmp / "a/manifest.json") == slurp(tmp / "b/manifest.json"));

    REQUIRE(run({"simulate", "--config", tmp / "a/manifest.json", "--out", tmp / "c"}) == 0);
    CHECK(slurp(tmp / "a/report.csv") == slurp(tmp / "c/report.csv"));
    CHECK(slurp(tmp / "a/manifest.json") == slurp(tmp / "c/manifest.json"));

    const auto manifest = nlohmann::json::parse(slurp(tmp / "a/manifest.json"));
    CHECK(manifest["seed"] == 7);
    CHECK(manifest["command"] == "simulate");
    CHECK(manifest["version"] == cli::version());
    CHECK(manifest["config"]["n0"] == 30);

    // Flags override the config file.
    REQUIRE(run({"simulate", "--config", tmp / "a/manifest.json", "--seed", "8", "--out", tmp / "d"}) == 0);
    CHECK(nlohmann::json::parse(slurp(tmp / "d/manifest.json"))["seed"] == 8);
    CHECK(slurp(tmp / "a/report.csv") != slurp(tmp / "d/report.csv"));

    std::string err;
    CHECK(run({"fit", "--config", tmp / "a/manifest.json", "--out", tmp / "e"}, &err) != 0);
    CHECK(err.find("manifest") != std::string::npos);
}

TEST_CASE("json config files") {
    TempDir tmp;
    spit(tmp / "cfg.json", R"({"n0": 25, "reps": 1, "ratios": [0], "ise_grid": 50, "lambda": 1e-4})");
    REQUIRE(run({"simulate", "--config", tmp / "cfg.json", "--out", tmp / "o"}) == 0);
    const auto m = nlohmann::json::parse(slurp(tmp / "o/manifest.json"));
    CHECK(m["config"]["n0"] == 25);
    CHECK(m["config"]["lambda"] == 1e-4);
    spit(tmp / "bad.json", R"({"n_zero": 25})");
    CHECK(run({"simulate", "--config", tmp / "bad.json", "--out", tmp / "p"}) != 0);
    spit(tmp / "broken.json", "{");
    CHECK(run({"simulate", "--config", tmp / "broken.json", "--out", tmp / "q"}) != 0);
}

TEST_CASE("inference subcommands") {
    TempDir tmp;
    Rng rng(10);
    const SimSetting s{SettingKind::Setting1, 10.0};
    const MultiSourceData d({generate(s, 0.0, 60, 0.5, rng, 0), generate(s, 0.05, 40, 0.5, rng, 1)});
    std::ostringstream os;
    write_multisource_csv(os, d);
    spit(tmp / "data.csv", os.str());
    const std::string before = slurp(tmp / "data.csv");

    REQUIRE(run({"ci", "--input", tmp / "data.csv", "--B", "60", "--grid", "11", "--out", tmp / "ci"}) == 0);
    const std::string ci = slurp(tmp / "ci/ci.csv");
    CHECK(ci.rfind("x1,estimate,lower,upper\n", 0) == 0);
    REQUIRE(run({"ci", "--input", tmp / "data.csv", "--B", "60", "--grid", "11", "--mode", "ds", "--out",
                 tmp / "cids"}) == 0);
    CHECK(slurp(tmp / "cids/ci.csv") != ci);

    spit(tmp / "truth.csv", [&] {
        std::ostringstream t;
        t << "x1,value\n";
        for (int i = 0; i <= 200; ++i) {
            const std::vector<double> x{i / 200.0};
            t << format_double(x[0]) << ',' << format_double(truth(s, 0.0, x)) << '\n';
        }
        return t.str();
    }());
    REQUIRE(run({"region", "--input", tmp / "data.csv", "--B", "60", "--curve", tmp / "truth.csv", "--out",
                 tmp / "reg"}) == 0);
    const auto summary = nlohmann::json::parse(slurp(tmp / "reg/summary.json"));
    CHECK(summary["radius"].get<double>() > 0.0);
    CHECK(summary.contains("contains_curve"));
    CHECK(summary["contains_curve"].get<bool>() ==
          (summary["curve_distance"].get<double>() <= summary["radius"].get<double>()));

    REQUIRE(run({"fit", "--input", tmp / "data.csv", "--kernel", "exp", "--exp-scale", "0.3", "--grid", "9",
                 "--out", tmp / "fitexp"}) == 0);
    CHECK(slurp(tmp / "data.csv") == before);

    // Outputs never overwrite inputs.
    spit(tmp / "ci/curve.csv", kTwoRow);
    CHECK(run({"fit", "--input", tmp / "ci/curve.csv", "--lambda", "0.1", "--out", tmp / "ci"}) != 0);
    CHECK(slurp(tmp / "ci/curve.csv") == kTwoRow);
}

TEST_CASE("experiment and diagnostic subcommands") {
    TempDir tmp;
    REQUIRE(run({"coverage", "--n0", "30", "--reps", "2", "--ratios", "0.5", "--B", "50", "--lambda", "1e-4",
                 "--out", tmp / "cov"}) == 0);
    CHECK(slurp(tmp / "cov/coverage.csv").find("coverage_mean") != std::string::npos);

    REQUIRE(run({"rate-check", "--sizes", "20,40,80", "--reps", "2", "--lambda-grid", "1e-5,1e-3", "--out",
                 tmp / "rate"}) == 0);
    CHECK(nlohmann::json::parse(slurp(tmp / "rate/summary.json")).contains("slope"));

    REQUIRE(run({"diagnose", "--lambda", "1", "--sample-sizes", "200,1600", "--out", tmp / "diag"}) == 0);
    const auto j = nlohmann::json::parse(slurp(tmp / "diag/diagnose.json"));
    CHECK(j["effective_dimension"].get<double>() == doctest::Approx(1.730).epsilon(1e-3));
    CHECK(j["balance_exponent"].get<double>() == 0.875);
    CHECK(j["balance"]["flagged"] == nlohmann::json::array({0}));
}

TEST_CASE("bad invocations fail with a diagnostic") {
    TempDir tmp;
    std::string err;
    CHECK(run({}, &err) != 0);
    CHECK(run({"frobnicate"}, &err) != 0);
    CHECK(run({"fit", "--out", tmp / "x"}, &err) == 1);
    CHECK(err.find("--input") != std::string::npos);
    CHECK(run({"fit", "--input", tmp / "missing.csv", "--out", tmp / "x"}, &err) == 1);
    spit(tmp / "two.csv", kTwoRow);
    CHECK(run({"fit", "--input", tmp / "two.csv", "--kernel", "gauss", "--out", tmp / "x"}, &err) == 1);
    CHECK(run({"fit", "--input", tmp / "two.csv", "--lambda", "-1", "--out", tmp / "x"}, &err) == 1);
    CHECK(run({"simulate", "--reps", "0", "--out", tmp / "x"}, &err) == 1);
}
