#include "onb/nn/dense.hpp"

#include <cmath>
#include <string>

namespace onb {

Matrix glorot_init(Index fan_in, Index fan_out, Rng& rng) {
    if (fan_in < 1 || fan_out < 1)
        throw ShapeError("glorot_init: fan_in and fan_out must be positive");
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    Matrix w(fan_out, fan_in);
    for (Index r = 0; r < fan_out; ++r)
        for (Index c = 0; c < fan_in; ++c)
            w(r, c) = rng.uniform(-limit, limit);
    return w;
}

MlpParams MlpParams::init(const std::vector<Index>& sizes,
                          Activation hidden_activation, Rng& rng,
                          Activation output_activation) {
    if (sizes.size() < 2)
        throw ShapeError("MlpParams::init: need at least input and output sizes");
    MlpParams p;
    p.layer_sizes = sizes;
    p.layers.reserve(sizes.size() - 1);
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        DenseLayer layer;
        layer.weights = glorot_init(sizes[l], sizes[l + 1], rng);
        layer.bias = Vector::Zero(sizes[l + 1]);
        layer.activation = (l + 2 == sizes.size()) ? output_activation
                                                   : hidden_activation;
        p.layers.push_back(std::move(layer));
    }
    return p;
}

MlpGrads MlpGrads::zeros_like(const MlpParams& p) {
    MlpGrads g;
    g.layers.resize(p.layers.size());
    for (std::size_t l = 0; l < p.layers.size(); ++l) {
        g.layers[l].dW = Matrix::Zero(p.layers[l].out_size(),
                                      p.layers[l].in_size());
        g.layers[l].db = Vector::Zero(p.layers[l].out_size());
    }
    return g;
}

std::vector<ParamView> param_views(MlpParams& p) {
    std::vector<ParamView> views;
    views.reserve(p.layers.size() * 2);
    for (auto& layer : p.layers) {
        views.push_back({layer.weights.data(), layer.weights.size()});
        views.push_back({layer.bias.data(), layer.bias.size()});
    }
    return views;
}

std::vector<ParamView> grad_views(MlpGrads& g) {
    std::vector<ParamView> views;
    views.reserve(g.layers.size() * 2);
    for (auto& layer : g.layers) {
        views.push_back({layer.dW.data(), layer.dW.size()});
        views.push_back({layer.db.data(), layer.db.size()});
    }
    return views;
}

Index param_count(const MlpParams& p) {
    Index n = 0;
    for (const auto& layer : p.layers) n += layer.weights.size() + layer.bias.size();
    return n;
}

Vector mlp_forward(const MlpParams& p, const Vector& x) {
    if (x.size() != p.in_size())
        throw ShapeError("mlp_forward: input size " + std::to_string(x.size()) +
                         " != " + std::to_string(p.in_size()));
    Vector h = x;
    for (std::size_t l = 0; l < p.layers.size(); ++l) {
        const auto& layer = p.layers[l];
        Vector z = layer.weights * h + layer.bias;
        if (!z.allFinite())
            throw NumericError("mlp_forward: non-finite output at layer " +
                               std::to_string(l));
        h = z.unaryExpr([a = layer.activation](double v) { return activate(a, v); });
    }
    return h;
}

Matrix mlp_forward_batch(const MlpParams& p, const Matrix& X,
                         MlpBatchCache* cache) {
    if (X.cols() != p.in_size())
        throw ShapeError("mlp_forward_batch: input width " +
                         std::to_string(X.cols()) + " != " +
                         std::to_string(p.in_size()));
    const Index n = X.rows();
    const std::size_t L = p.layers.size();

    MlpBatchCache local;
    MlpBatchCache& c = cache ? *cache : local;
    c.pre.resize(L);
    c.post.resize(L + 1);
    c.post[0] = X;

    for (std::size_t l = 0; l < L; ++l) {
        const auto& layer = p.layers[l];
        c.pre[l].resize(n, layer.out_size());
        c.post[l + 1].resize(n, layer.out_size());
        const Matrix& H = c.post[l];
        Matrix& Z = c.pre[l];
        Matrix& Hn = c.post[l + 1];
        parallel_for_chunks(n, kRowChunk, [&](Index, Index b, Index e) {
            Z.middleRows(b, e - b).noalias() =
                H.middleRows(b, e - b) * layer.weights.transpose();
            Z.middleRows(b, e - b).rowwise() += layer.bias.transpose();
            Hn.middleRows(b, e - b) = Z.middleRows(b, e - b).unaryExpr(
                [a = layer.activation](double v) { return activate(a, v); });
        });
        if (!Z.allFinite())
            throw NumericError("mlp_forward_batch: non-finite output at layer " +
                               std::to_string(l));
    }
    return c.post[L];
}

void mlp_backward_batch(const MlpParams& p, const MlpBatchCache& cache,
                        const Matrix& dOut, MlpGrads& grads, Matrix* dX) {
    const std::size_t L = p.layers.size();
    if (cache.pre.size() != L || cache.post.size() != L + 1)
        throw ShapeError("mlp_backward_batch: cache does not match params");
    if (dOut.rows() != cache.post[0].rows() || dOut.cols() != p.out_size())
        throw ShapeError("mlp_backward_batch: dOut shape mismatch");
    const Index n = dOut.rows();

    grads.layers.resize(L);
    Matrix G = dOut;
    for (std::size_t li = L; li-- > 0;) {
        const auto& layer = p.layers[li];
        const Matrix& Z = cache.pre[li];
        const Matrix& Hin = cache.post[li];

        // Gz = G .* act'(Z), row-partitioned.
        Matrix Gz(n, layer.out_size());
        parallel_for_chunks(n, kRowChunk, [&](Index, Index b, Index e) {
            Gz.middleRows(b, e - b) =
                G.middleRows(b, e - b).cwiseProduct(Z.middleRows(b, e - b).unaryExpr(
                    [a = layer.activation](double v) { return activate_grad(a, v); }));
        });

        // dW = Gz^T * Hin and db = colsum(Gz): per-chunk partials reduced in
        // fixed chunk order so the result is thread-count independent.
        const Index chunks = num_chunks(n, kRowChunk);
        std::vector<Matrix> dW_part(chunks);
        std::vector<Vector> db_part(chunks);
        parallel_for_chunks(n, kRowChunk, [&](Index ci, Index b, Index e) {
            dW_part[ci].noalias() =
                Gz.middleRows(b, e - b).transpose() * Hin.middleRows(b, e - b);
            db_part[ci] = Gz.middleRows(b, e - b).colwise().sum().transpose();
        });
        Matrix dW = Matrix::Zero(layer.out_size(), layer.in_size());
        Vector db = Vector::Zero(layer.out_size());
        for (Index ci = 0; ci < chunks; ++ci) {
            dW += dW_part[ci];
            db += db_part[ci];
        }
        if (!dW.allFinite() || !db.allFinite())
            throw NumericError("mlp_backward_batch: non-finite gradient at layer " +
                               std::to_string(li));
        grads.layers[li].dW = std::move(dW);
        grads.layers[li].db = std::move(db);

        if (li > 0 || dX != nullptr) {
            Matrix Gprev(n, layer.in_size());
            parallel_for_chunks(n, kRowChunk, [&](Index, Index b, Index e) {
                Gprev.middleRows(b, e - b).noalias() =
                    Gz.middleRows(b, e - b) * layer.weights;
            });
            G = std::move(Gprev);
        }
    }
    if (dX) *dX = std::move(G);
}

}  // namespace onb
