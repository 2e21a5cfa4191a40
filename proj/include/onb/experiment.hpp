#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "onb/baselines.hpp"
#include "onb/dataset.hpp"
#include "onb/deeponet.hpp"
#include "onb/eval.hpp"
#include "onb/report.hpp"

namespace onb {

/// Everything a run needs; a resolved config plus the code version pins all
/// outputs. Fields at -1 / empty mean "use the problem default".
struct ExperimentConfig {
    std::string problem = "ode";  // ode | diffusion | burgers
    std::filesystem::path out_dir = "runs/ode";
    std::uint64_t seed = 42;
    int threads = 0;
    bool full_scale = false;  // diffusion: switch to full_n_train functions

    // dataset
    Index n_train = -1;
    Index n_test = -1;
    Index n_queries = 100;
    Index n_sensors = 100;
    Index full_n_train = 10000;

    // input random field
    double grf_length_scale = -1.0;
    std::string grf_kernel;  // rbf | periodic_rbf
    double grf_jitter = 1e-10;

    // solvers
    int ode_steps = 1000;
    double diffusion_d = 0.01;
    double diffusion_k = 0.05;
    double burgers_nu = 0.01;
    Index burgers_internal_n = 128;
    Index out_nx = 100;
    Index out_nt = 100;

    // model
    std::vector<Index> branch_sizes;  // default {n_sensors, 40, 40}
    std::vector<Index> trunk_sizes;   // default {query_dim, 40, 40}
    bool stacked = false;
    bool output_bias = false;

    // training
    std::string loss = "mse";
    std::string metric;        // default: l2rel (ode, burgers), mse (diffusion)
    long long iterations = -1; // default: 10000 / 10000 / 50000
    double lr = 1e-3;
    long long log_every = 100;

    // baseline comparison
    Index baseline_points = -1;  // default: 50 (ode), 100 (others)
    int baseline_epochs = 2000;
    int fcn_batch = 10;
    int cnn_batch = 20;

    // sweeps
    std::vector<Index> sweep_widths{20, 40, 60, 80};
    std::vector<long long> sweep_iterations;
};

/// Fills defaults that depend on the problem; validates the problem name.
ExperimentConfig resolve_defaults(ExperimentConfig cfg);

nlohmann::json config_to_json(const ExperimentConfig& cfg);

/// SHA-256 of the canonical JSON form of the resolved config.
std::string config_hash(const ExperimentConfig& cfg);

struct ExperimentPaths {
    std::filesystem::path train_data;
    std::filesystem::path test_data;
    std::filesystem::path deeponet_ckpt;
    std::filesystem::path history_csv;
    std::filesystem::path report_dir;
    std::filesystem::path sweep_csv;
};
ExperimentPaths experiment_paths(const ExperimentConfig& cfg);

/// Query dimension for the configured problem (1 for ode, else 2).
Index problem_query_dim(const ExperimentConfig& cfg);

DeepONetArch make_arch(const ExperimentConfig& cfg);
TrainConfig make_train_config(const ExperimentConfig& cfg);

/// Builds the train/test datasets and writes the .opds containers.
void cmd_generate(const ExperimentConfig& cfg);

/// model: deeponet (default) or fcn/cnn with a test-function id. Writes a
/// checkpoint plus a training history CSV; on divergence the partial history
/// is still written before the error propagates.
void cmd_train(const ExperimentConfig& cfg,
               const std::string& model = "deeponet", Index function_id = -1);

/// Evaluates the trained operator network on the test split and emits the
/// report files. Returns the summary.
SummaryStats cmd_evaluate(const ExperimentConfig& cfg);

/// Trunk-width sweep (default) or iteration sweep when sweep_iterations is
/// non-empty. Emits sweep.csv.
void cmd_sweep(const ExperimentConfig& cfg);

/// Trains FCN and CNN on the best/worst test functions of the evaluated run
/// and emits comparison.csv (2 functions x 3 models).
void cmd_compare(const ExperimentConfig& cfg);

/// Re-derives summary.json and the histograms from metrics.csv.
void cmd_report(const ExperimentConfig& cfg);

}  // namespace onb
