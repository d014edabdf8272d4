#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "archetype/samplers.hpp"
#include "archetype/solver.hpp"

namespace arch {

/// Shared experiment knobs; each example fills in its own distribution and
/// schedule defaults from the study it reproduces.
struct ExperimentConfig {
    int repeats = 100;
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    std::string tag;        // subdirectory; defaults to "seed-<seed>"
    std::size_t n = 30000;  // sample size for the alpha-sweep studies
    std::size_t n_max = 30033;  // largest N in the growing-N study
    bool quick = false;         // caps the growing-N study at 3,333
    int inits = 0;              // initializations for the robustness studies (0 = default)
    std::vector<double> alphas;  // empty = example default
    SolverConfig solver;
};

/// One fitted trial. wall_time is reported in timings.log only, so the CSV
/// artifacts stay byte-identical across reruns of the same seed.
struct ResultRow {
    std::size_t n = 0;
    double alpha = 0.0;
    int repeat = 0;
    std::uint64_t seed = 0;
    double objective = 0.0;
    double area = 0.0;
    double min_angle = 0.0;
    double max_angle = 0.0;
    double d2inf_to_oracle = 0.0;
    bool contains_mean = false;
    int iterations = 0;
    double wall_time = 0.0;
};

struct ExperimentResult {
    std::vector<ResultRow> rows;
    std::string run_dir;
    /// d₂,∞ between final archetype sets of different initializations
    /// (examples 3 and 4 robustness studies).
    std::vector<double> pairwise_d2inf;
};

/// Runs jobs 0..count-1 on a small worker pool. Pool size is the minimum of
/// the job count, the hardware concurrency, and ARCHETYPE_THREADS when set.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

// Flat key=value config files; '#' starts a comment. Unknown keys are
// rejected so typos do not silently fall back to defaults.
ExperimentConfig load_experiment_config(const ExperimentConfig& defaults,
                                        const std::string& path);

std::vector<std::size_t> example1_schedule(std::size_t n_max);

ExperimentResult run_example(int which, const ExperimentConfig& cfg);

struct FitArgs {
    std::string data_path;
    int k = 3;
    double alpha = 0.0;
    double tol = 1e-6;
    double tau = 0.5;
    std::uint64_t seed = 1;
    std::string init = "random";  // "random" or a CSV of k initial archetypes
    std::string out_dir = "out/fit";
};

// Process-level entry points; return the CLI exit code
// (0 ok, 1 verification failure, 2 input error, 3 solver abort).
int cmd_fit(const FitArgs& args);
int cmd_example(int which, const ExperimentConfig& cfg);
int cmd_verify(std::uint64_t seed);

/// Mean of the sampling distribution (used for the contains-mean flags).
std::vector<double> distribution_mean(const DistributionSpec& spec);

/// Data + archetype hull overlay figure in the styling of the study plots:
/// magenta data hull, red archetype hull, black distribution mean.
void write_overlay_svg(const std::string& path, const Matrix& x, const Matrix& z,
                       const std::vector<double>& mean,
                       std::size_t max_scatter = 2000);

void write_results_csv(const std::string& path, const std::vector<ResultRow>& rows);

}  // namespace arch
