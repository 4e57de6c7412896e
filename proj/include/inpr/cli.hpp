#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace inpr::cli {

std::string version();

/// Fully resolved settings of one invocation. Defaults, then the JSON config
/// (or the "config" object of a manifest), then command-line flags.
struct RunConfig {
    std::string command;
    std::string input;
    std::string out = "inpr_out";
    std::uint64_t seed = 1;
    int threads = 1;

    // Estimation.
    std::string kernel = "sobolev2";
    double exp_scale = 1.0;
    double exp_exponent = 1.0;
    std::string mode = "cs";
    bool shuffle = true;
    std::optional<double> lambda;
    std::vector<double> lambda_grid;
    int grid = 101;
    double alpha = 0.05;
    int B = 200;
    std::string curve;

    // Experiments.
    std::string setting = "setting1";
    double snr = 10.0;
    int n0 = 200;
    std::vector<double> ratios{0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0};
    double tau = 0.05;
    int reps = 100;
    std::string lambda_policy = "pooled";
    bool fresh_halves = false;
    int eval_grid = 21;
    int ise_grid = 0;
    std::vector<int> sizes{100, 200, 400, 800, 1600};

    // Diagnostics.
    double beta = 2.0;
    int dim = 1;
    double slack = 1.0;
    long truncation = 10000;
    std::vector<long> sample_sizes;
};

/// Runs the command line; returns the process exit status. Diagnostics go to err.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Executes an already resolved configuration, writing artifacts under cfg.out.
void execute(const RunConfig& cfg, std::ostream& log);

}  // namespace inpr::cli
