#pragma once

#include <vector>

#include "onb/common.hpp"
#include "onb/nn/activations.hpp"
#include "onb/rng.hpp"

namespace onb {

/// Glorot-uniform weight matrix, shape (fan_out x fan_in). Entries are drawn
/// row-major from U[-sqrt(6/(fan_in+fan_out)), +sqrt(...)].
Matrix glorot_init(Index fan_in, Index fan_out, Rng& rng);

struct DenseLayer {
    Matrix weights;  // out x in
    Vector bias;     // out
    Activation activation = Activation::Identity;

    Index in_size() const { return weights.cols(); }
    Index out_size() const { return weights.rows(); }
};

struct MlpParams {
    std::vector<DenseLayer> layers;
    std::vector<Index> layer_sizes;

    Index in_size() const { return layer_sizes.front(); }
    Index out_size() const { return layer_sizes.back(); }

    /// Glorot weights, zero biases. `hidden_activation` is applied to every
    /// layer except the last; the last layer uses `output_activation`.
    static MlpParams init(const std::vector<Index>& sizes,
                          Activation hidden_activation, Rng& rng,
                          Activation output_activation = Activation::Identity);
};

struct DenseGrad {
    Matrix dW;
    Vector db;
};

struct MlpGrads {
    std::vector<DenseGrad> layers;
    static MlpGrads zeros_like(const MlpParams& p);
};

/// Flat view over a parameter or gradient block, used by the optimizer.
struct ParamView {
    double* data;
    Index size;
};

std::vector<ParamView> param_views(MlpParams& p);
std::vector<ParamView> grad_views(MlpGrads& g);
Index param_count(const MlpParams& p);

/// Single-sample forward pass.
Vector mlp_forward(const MlpParams& p, const Vector& x);

/// Caches for one batched forward pass; consumed by the backward pass.
struct MlpBatchCache {
    std::vector<Matrix> pre;   // pre[l]  = Z_{l+1}, rows = samples
    std::vector<Matrix> post;  // post[0] = X, post[l+1] = H_{l+1}
};

/// Rows of X are samples. Row-partitioned internally, so results are
/// identical for any thread count.
Matrix mlp_forward_batch(const MlpParams& p, const Matrix& X,
                         MlpBatchCache* cache = nullptr);

/// dOut has one row per sample. Accumulates nothing: grads are overwritten.
/// Cross-sample sums are reduced over fixed row chunks in chunk order.
void mlp_backward_batch(const MlpParams& p, const MlpBatchCache& cache,
                        const Matrix& dOut, MlpGrads& grads,
                        Matrix* dX = nullptr);

}  // namespace onb
