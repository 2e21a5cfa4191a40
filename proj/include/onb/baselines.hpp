#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "onb/dataset.hpp"
#include "onb/nn/checkpoint.hpp"
#include "onb/nn/conv1d.hpp"
#include "onb/nn/dense.hpp"

namespace onb {

/// Point regressor P -> s(P): input -> 30 -> 30 -> 1, ReLU hidden layers.
struct FcnModel {
    MlpParams mlp;
    static FcnModel init(Index input_dim, Rng& rng);
};

/// Conv1d(1 -> 32, kernel 1) -> tanh -> flatten -> dropout(0.5) ->
/// linear(32*n -> 2048) -> tanh -> linear(2048 -> 1).
/// An n-feature input is treated as a single-channel sequence of length n,
/// so the first linear layer takes 32*n inputs.
struct CnnModel {
    Conv1dLayer conv;
    double dropout_p = 0.5;
    MlpParams head;  // {32*n, 2048, 1}, tanh then linear
    Index input_dim = 1;
    static CnnModel init(Index input_dim, Rng& rng);
};

struct BaselineTrainConfig {
    double lr = 1e-3;
    int epochs = 2000;
    int batch_size = 10;  // protocol: 10 for FCN, 20 for CNN
    std::uint64_t seed = 0;
};

struct FcnTrainResult {
    FcnModel model;
    std::vector<double> epoch_loss;
};

struct CnnTrainResult {
    CnnModel model;
    std::vector<double> epoch_loss;
};

/// Mini-batch Adam on MSE; batches reshuffled every epoch from a per-epoch
/// derived stream. Dropout is active only here, never in predict().
FcnTrainResult train_fcn(const BaselineDataset& data,
                         const BaselineTrainConfig& cfg);
CnnTrainResult train_cnn(const BaselineDataset& data,
                         const BaselineTrainConfig& cfg);

double predict(const FcnModel& m, const Vector& P);
double predict(const CnnModel& m, const Vector& P);
Vector predict_batch(const FcnModel& m, const Matrix& P);
Vector predict_batch(const CnnModel& m, const Matrix& P);

/// Bernoulli keep mask (0/1 entries), keep probability 1 - p.
Matrix dropout_mask(Index rows, Index cols, double p, Rng& rng);

void save_fcn_checkpoint(const std::filesystem::path& path, const FcnModel& m,
                         const nlohmann::json& extra = {});
FcnModel load_fcn_checkpoint(const std::filesystem::path& path);
void save_cnn_checkpoint(const std::filesystem::path& path, const CnnModel& m,
                         const nlohmann::json& extra = {});
CnnModel load_cnn_checkpoint(const std::filesystem::path& path);

}  // namespace onb
