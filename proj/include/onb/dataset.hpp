#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "onb/grf.hpp"
#include "onb/solvers/burgers.hpp"
#include "onb/solvers/diffusion.hpp"

namespace onb {

enum class Layout { Aligned, Unaligned };

std::string to_string(Layout l);
Layout layout_from_string(const std::string& s);

struct Provenance {
    std::string problem;  // ode | diffusion | burgers
    nlohmann::json solver_config;
    std::uint64_t dataset_seed = 0;
    std::string split;  // train | test
};

/// Operator-learning triples (u, P, s(P)) grouped by input function.
struct OperatorDataset {
    InputFunctionSet inputs;
    Index query_dim = 1;
    std::vector<Matrix> queries;  // per function: n_queries x query_dim
    std::vector<Vector> targets;  // per function: n_queries
    Layout layout = Layout::Aligned;
    Provenance provenance;

    Index n_functions() const { return inputs.n_functions(); }
    Index n_points() const;
    /// Checks sizes, target finiteness, and that the layout flag matches
    /// what the query lists actually are.
    void validate() const;
};

struct OdeDatasetConfig {
    Index n_train = 150;
    Index n_test = 1000;
    Index n_queries = 100;
    int ode_steps = 1000;
    GrfConfig grf{100, 0.0, 1.0, 0.2, GrfKernel::RBF, 1e-10};
};

struct DiffusionDatasetConfig {
    Index n_train = 1000;  // desk scale; the full protocol uses 10000
    Index n_test = 1000;
    Index n_queries = 100;
    DiffusionConfig solver;
    GrfConfig grf{100, 0.0, 1.0, 0.2, GrfKernel::RBF, 1e-10};
};

struct BurgersDatasetConfig {
    Index n_train = 150;
    Index n_test = 1000;
    Index n_queries = 100;
    BurgersConfig solver;
    GrfConfig grf{100, 0.0, 10.0, 1.0, GrfKernel::PeriodicRBF, 1e-10};
};

/// Aligned: one query set over the RK solution nodes, shared by every
/// function in both splits.
std::pair<OperatorDataset, OperatorDataset> build_ode_dataset(
    const OdeDatasetConfig& cfg, std::uint64_t seed);

/// Unaligned: per-function query points drawn from the output grid nodes.
std::pair<OperatorDataset, OperatorDataset> build_diffusion_dataset(
    const DiffusionDatasetConfig& cfg, std::uint64_t seed);

/// Aligned over the output grid; the initial condition is the input row.
std::pair<OperatorDataset, OperatorDataset> build_burgers_dataset(
    const BurgersDatasetConfig& cfg, std::uint64_t seed);

/// Point-regression data for one input function: training points resampled
/// from the solver grid excluding that function's query points; test points
/// are exactly its query points.
struct BaselineDataset {
    Index source_function_id = 0;
    std::string problem;
    Matrix train_points;  // n_train x dim
    Vector train_values;
    Matrix test_points;  // the function's original queries
    Vector test_values;
};

BaselineDataset resample_for_baseline(const OperatorDataset& dataset,
                                      Index function_id, Index n_train_points,
                                      std::uint64_t seed);

/// .opds container: a directory holding manifest.json plus u.f64 / p.f64 /
/// s.f64 little-endian blobs. Round trips are bit-exact.
void save_dataset(const OperatorDataset& d, const std::filesystem::path& dir);
OperatorDataset load_dataset(const std::filesystem::path& dir);

}  // namespace onb
