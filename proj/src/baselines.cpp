#include "onb/baselines.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "onb/nn/adam.hpp"

namespace onb {

FcnModel FcnModel::init(Index input_dim, Rng& rng) {
    FcnModel m;
    m.mlp = MlpParams::init({input_dim, 30, 30, 1}, Activation::ReLU, rng,
                            Activation::Identity);
    return m;
}

CnnModel CnnModel::init(Index input_dim, Rng& rng) {
    CnnModel m;
    m.input_dim = input_dim;
    m.conv = Conv1dLayer::init(1, 32, 1, 1, rng);
    m.head = MlpParams::init({32 * input_dim, 2048, 1}, Activation::Tanh, rng,
                             Activation::Identity);
    return m;
}

Matrix dropout_mask(Index rows, Index cols, double p, Rng& rng) {
    Matrix mask(rows, cols);
    for (Index r = 0; r < rows; ++r)
        for (Index c = 0; c < cols; ++c)
            mask(r, c) = rng.uniform() >= p ? 1.0 : 0.0;
    return mask;
}

namespace {

// Conv (kernel 1, single channel in) + tanh + flatten over a batch of
// n-feature rows. Returns (batch x 32n): feature index = channel*n + i.
Matrix conv_tanh_flat(const CnnModel& m, const Matrix& X, Matrix* pre_out) {
    const Index batch = X.rows();
    const Index n = X.cols();
    const Index ch = m.conv.out_channels();
    Matrix pre(batch, ch * n);
    for (Index b = 0; b < batch; ++b) {
        const Matrix x = X.row(b);  // 1 x n sequence
        const Matrix y = conv1d_forward(m.conv, x);
        for (Index c = 0; c < ch; ++c)
            for (Index i = 0; i < n; ++i) pre(b, c * n + i) = y(c, i);
    }
    if (pre_out) *pre_out = pre;
    return pre.array().tanh().matrix();
}

}  // namespace

double predict(const FcnModel& m, const Vector& P) {
    return mlp_forward(m.mlp, P)(0);
}

Vector predict_batch(const FcnModel& m, const Matrix& P) {
    return mlp_forward_batch(m.mlp, P);
}

double predict(const CnnModel& m, const Vector& P) {
    return predict_batch(m, P.transpose())(0);
}

Vector predict_batch(const CnnModel& m, const Matrix& P) {
    if (P.cols() != m.input_dim)
        throw ShapeError("cnn predict: input dim " + std::to_string(P.cols()) +
                         " != " + std::to_string(m.input_dim));
    const Matrix feat = conv_tanh_flat(m, P, nullptr);
    return mlp_forward_batch(m.head, feat);  // dropout disabled in evaluation
}

FcnTrainResult train_fcn(const BaselineDataset& data,
                         const BaselineTrainConfig& cfg) {
    if (data.train_points.rows() == 0)
        throw ShapeError("train_fcn: empty training data");
    Rng rng(cfg.seed);
    FcnTrainResult result;
    result.model = FcnModel::init(data.train_points.cols(), rng);
    MlpParams& mlp = result.model.mlp;

    auto views = param_views(mlp);
    AdamConfig acfg;
    acfg.lr = cfg.lr;
    AdamState adam = AdamState::init(views, acfg);

    const Index n = data.train_points.rows();
    std::vector<Index> order(n);
    std::iota(order.begin(), order.end(), Index{0});

    MlpBatchCache cache;
    MlpGrads grads;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        auto epoch_rng = rng.derive(0xf0, static_cast<std::uint64_t>(epoch));
        epoch_rng.shuffle(order);
        double loss_acc = 0.0;
        int batches = 0;
        for (Index start = 0; start < n; start += cfg.batch_size) {
            const Index bs = std::min<Index>(cfg.batch_size, n - start);
            Matrix X(bs, data.train_points.cols());
            Vector y(bs);
            for (Index r = 0; r < bs; ++r) {
                X.row(r) = data.train_points.row(order[start + r]);
                y(r) = data.train_values(order[start + r]);
            }
            const Matrix out = mlp_forward_batch(mlp, X, &cache);
            const Vector resid = out.col(0) - y;
            const double loss = resid.squaredNorm() / static_cast<double>(bs);
            if (!std::isfinite(loss))
                throw DivergenceError("train_fcn: non-finite loss at epoch " +
                                      std::to_string(epoch));
            loss_acc += loss;
            ++batches;
            const Matrix dOut = (2.0 / static_cast<double>(bs)) * resid;
            mlp_backward_batch(mlp, cache, dOut, grads);
            adam_step(adam, views, grad_views(grads));
        }
        result.epoch_loss.push_back(loss_acc / std::max(1, batches));
    }
    return result;
}

CnnTrainResult train_cnn(const BaselineDataset& data,
                         const BaselineTrainConfig& cfg) {
    if (data.train_points.rows() == 0)
        throw ShapeError("train_cnn: empty training data");
    Rng rng(cfg.seed);
    CnnTrainResult result;
    result.model = CnnModel::init(data.train_points.cols(), rng);
    CnnModel& m = result.model;

    std::vector<ParamView> views;
    for (auto& k : m.conv.kernels) views.push_back({k.data(), k.size()});
    views.push_back({m.conv.bias.data(), m.conv.bias.size()});
    {
        auto v = param_views(m.head);
        views.insert(views.end(), v.begin(), v.end());
    }
    AdamConfig acfg;
    acfg.lr = cfg.lr;
    AdamState adam = AdamState::init(views, acfg);

    const Index n = data.train_points.rows();
    const Index dim = data.train_points.cols();
    const double keep = 1.0 - m.dropout_p;
    std::vector<Index> order(n);
    std::iota(order.begin(), order.end(), Index{0});

    MlpBatchCache head_cache;
    MlpGrads head_grads;
    Conv1dGrads conv_grads, conv_batch_grads;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        auto epoch_rng = rng.derive(0xf1, static_cast<std::uint64_t>(epoch));
        epoch_rng.shuffle(order);
        double loss_acc = 0.0;
        int batches = 0;
        for (Index start = 0; start < n; start += cfg.batch_size) {
            const Index bs = std::min<Index>(cfg.batch_size, n - start);
            Matrix X(bs, dim);
            Vector y(bs);
            for (Index r = 0; r < bs; ++r) {
                X.row(r) = data.train_points.row(order[start + r]);
                y(r) = data.train_values(order[start + r]);
            }

            Matrix conv_pre;
            const Matrix feat = conv_tanh_flat(m, X, &conv_pre);
            const Matrix mask =
                dropout_mask(bs, feat.cols(), m.dropout_p, epoch_rng);
            const Matrix dropped = feat.cwiseProduct(mask) / keep;

            const Matrix out = mlp_forward_batch(m.head, dropped, &head_cache);
            const Vector resid = out.col(0) - y;
            const double loss = resid.squaredNorm() / static_cast<double>(bs);
            if (!std::isfinite(loss))
                throw DivergenceError("train_cnn: non-finite loss at epoch " +
                                      std::to_string(epoch));
            loss_acc += loss;
            ++batches;

            const Matrix dOut = (2.0 / static_cast<double>(bs)) * resid;
            Matrix dDropped;
            mlp_backward_batch(m.head, head_cache, dOut, head_grads, &dDropped);
            const Matrix dFeat = dDropped.cwiseProduct(mask) / keep;
            // tanh' from the conv pre-activation, then conv backward per sample.
            const Matrix dPre = dFeat.cwiseProduct(
                conv_pre.unaryExpr([](double z) {
                    const double t = std::tanh(z);
                    return 1.0 - t * t;
                }));
            conv_grads.dK.assign(m.conv.out_channels(),
                                 Matrix::Zero(1, m.conv.kernel_len()));
            conv_grads.db = Vector::Zero(m.conv.out_channels());
            for (Index b = 0; b < bs; ++b) {
                Matrix dY(m.conv.out_channels(), dim);
                for (Index c = 0; c < m.conv.out_channels(); ++c)
                    for (Index i = 0; i < dim; ++i)
                        dY(c, i) = dPre(b, c * dim + i);
                conv1d_backward(m.conv, X.row(b), dY, conv_batch_grads);
                for (Index c = 0; c < m.conv.out_channels(); ++c)
                    conv_grads.dK[c] += conv_batch_grads.dK[c];
                conv_grads.db += conv_batch_grads.db;
            }

            std::vector<ParamView> gviews;
            for (auto& k : conv_grads.dK) gviews.push_back({k.data(), k.size()});
            gviews.push_back({conv_grads.db.data(), conv_grads.db.size()});
            {
                auto v = grad_views(head_grads);
                gviews.insert(gviews.end(), v.begin(), v.end());
            }
            adam_step(adam, views, gviews);
        }
        result.epoch_loss.push_back(loss_acc / std::max(1, batches));
    }
    return result;
}

namespace {

nlohmann::json conv_header(const Conv1dLayer& c) {
    return {{"in_channels", c.in_channels()},
            {"out_channels", c.out_channels()},
            {"kernel_len", c.kernel_len()},
            {"stride", c.stride}};
}

}  // namespace

void save_fcn_checkpoint(const std::filesystem::path& path, const FcnModel& m,
                         const nlohmann::json& extra) {
    Checkpoint ck;
    ck.header["kind"] = "fcn";
    ck.header["mlp"] = mlp_header(m.mlp);
    for (auto it = extra.begin(); it != extra.end(); ++it)
        ck.header[it.key()] = it.value();
    append_mlp_values(m.mlp, ck.values);
    ck.header["param_count"] = ck.values.size();
    save_checkpoint(path, ck);
}

FcnModel load_fcn_checkpoint(const std::filesystem::path& path) {
    const Checkpoint ck = load_checkpoint(path);
    if (ck.header.value("kind", "") != "fcn")
        throw IoError("not an fcn checkpoint: " + path.string());
    FcnModel m;
    std::size_t cursor = 0;
    m.mlp = mlp_from_header(ck.header.at("mlp"), ck.values, cursor);
    return m;
}

void save_cnn_checkpoint(const std::filesystem::path& path, const CnnModel& m,
                         const nlohmann::json& extra) {
    Checkpoint ck;
    ck.header["kind"] = "cnn";
    ck.header["conv"] = conv_header(m.conv);
    ck.header["dropout_p"] = m.dropout_p;
    ck.header["head"] = mlp_header(m.head);
    ck.header["input_dim"] = m.input_dim;
    for (auto it = extra.begin(); it != extra.end(); ++it)
        ck.header[it.key()] = it.value();
    for (const auto& k : m.conv.kernels)
        for (Index r = 0; r < k.rows(); ++r)
            for (Index c = 0; c < k.cols(); ++c) ck.values.push_back(k(r, c));
    for (Index i = 0; i < m.conv.bias.size(); ++i)
        ck.values.push_back(m.conv.bias(i));
    append_mlp_values(m.head, ck.values);
    ck.header["param_count"] = ck.values.size();
    save_checkpoint(path, ck);
}

CnnModel load_cnn_checkpoint(const std::filesystem::path& path) {
    const Checkpoint ck = load_checkpoint(path);
    if (ck.header.value("kind", "") != "cnn")
        throw IoError("not a cnn checkpoint: " + path.string());
    CnnModel m;
    const auto& ch = ck.header.at("conv");
    const Index in_ch = ch.at("in_channels").get<Index>();
    const Index out_ch = ch.at("out_channels").get<Index>();
    const Index klen = ch.at("kernel_len").get<Index>();
    m.conv.stride = ch.at("stride").get<Index>();
    m.dropout_p = ck.header.at("dropout_p").get<double>();
    m.input_dim = ck.header.at("input_dim").get<Index>();
    std::size_t cursor = 0;
    for (Index o = 0; o < out_ch; ++o) {
        Matrix k(in_ch, klen);
        for (Index r = 0; r < in_ch; ++r)
            for (Index c = 0; c < klen; ++c) k(r, c) = ck.values.at(cursor++);
        m.conv.kernels.push_back(std::move(k));
    }
    m.conv.bias.resize(out_ch);
    for (Index i = 0; i < out_ch; ++i) m.conv.bias(i) = ck.values.at(cursor++);
    m.head = mlp_from_header(ck.header.at("head"), ck.values, cursor);
    return m;
}

}  // namespace onb
