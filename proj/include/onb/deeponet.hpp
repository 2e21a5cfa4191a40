#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "onb/dataset.hpp"
#include "onb/nn/adam.hpp"
#include "onb/nn/dense.hpp"

namespace onb {

/// Branch-trunk operator network: G(u)(P) ~ sum_k b_k(u) t_k(P).
struct DeepONetArch {
    std::vector<Index> branch_sizes{100, 40, 40};
    std::vector<Index> trunk_sizes{1, 40, 40};
    bool stacked = false;
    bool use_output_bias = false;
    Activation activation = Activation::ReLU;
};

struct DeepONetParams {
    /// One net with latent_dim outputs, or latent_dim nets with one output
    /// each when stacked.
    std::vector<MlpParams> branch;
    MlpParams trunk;
    bool stacked = false;
    bool has_output_bias = false;
    double output_bias = 0.0;
    Index latent_dim = 0;

    Index sensor_count() const { return branch.front().in_size(); }
    Index query_dim() const { return trunk.in_size(); }

    /// Glorot init; the trunk output layer keeps the activation, the branch
    /// output layer is linear.
    static DeepONetParams init(const DeepONetArch& arch, Rng& rng);
};

std::vector<ParamView> param_views(DeepONetParams& p, bool include_trunk = true);

/// Single-sample prediction.
double deeponet_forward(const DeepONetParams& p, const Vector& u,
                        const Vector& P);

/// Batched predictions for every (function, query) pair of a dataset, in
/// function-major order, split per function.
std::vector<Vector> predict_dataset(const DeepONetParams& p,
                                    const OperatorDataset& d);

enum class LossKind { MSE, MeanL2Relative };

std::string to_string(LossKind k);
LossKind loss_kind_from_string(const std::string& s);

double loss_mse(const Vector& pred, const Vector& target);

/// Mean over functions of ||pred_f - target_f||_2 / ||target_f||_2.
double loss_mean_l2_relative(const std::vector<Vector>& preds,
                             const std::vector<Vector>& targets);

struct TrainConfig {
    LossKind loss = LossKind::MSE;
    LossKind metric = LossKind::MeanL2Relative;
    long long iterations = 10000;
    double lr = 1e-3;
    std::uint64_t seed = 0;
    long long log_every = 100;
    bool freeze_trunk = false;
    /// Iterations at which to copy out the parameters (e.g. {50000}).
    std::vector<long long> snapshot_iterations;
};

struct TrainHistoryRow {
    long long iteration;
    double train_loss;
    double test_loss;    // NaN when no test set was given
    double test_metric;  // NaN when no test set was given
};

struct TrainResult {
    DeepONetParams params;
    std::vector<TrainHistoryRow> history;
    std::vector<std::pair<long long, DeepONetParams>> snapshots;
};

/// Full-batch Adam on the selected loss. History rows are appended every
/// log_every iterations (and at the final iteration); row i reflects the
/// parameters after i updates. Throws DivergenceError on non-finite loss;
/// rows produced so far are flushed to history_sink when given.
TrainResult train_deeponet(const OperatorDataset& train,
                           const OperatorDataset* test,
                           const DeepONetArch& arch, const TrainConfig& cfg,
                           std::vector<TrainHistoryRow>* history_sink = nullptr);

/// Checkpoint with a DeepONet envelope (stacked flag, latent dim, plus any
/// caller fields merged into the header).
void save_deeponet_checkpoint(const std::filesystem::path& path,
                              const DeepONetParams& p,
                              const nlohmann::json& extra = {});
DeepONetParams load_deeponet_checkpoint(const std::filesystem::path& path,
                                        nlohmann::json* header_out = nullptr);

}  // namespace onb
