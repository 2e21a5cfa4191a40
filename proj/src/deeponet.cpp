#include "onb/deeponet.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "onb/nn/checkpoint.hpp"

namespace onb {

DeepONetParams DeepONetParams::init(const DeepONetArch& arch, Rng& rng) {
    if (arch.branch_sizes.size() < 2 || arch.trunk_sizes.size() < 2)
        throw ShapeError("DeepONet: branch and trunk need at least two sizes");
    if (arch.branch_sizes.back() != arch.trunk_sizes.back())
        throw ShapeError("DeepONet: branch output width != trunk output width");

    DeepONetParams p;
    p.stacked = arch.stacked;
    p.latent_dim = arch.branch_sizes.back();
    p.has_output_bias = arch.use_output_bias;
    p.output_bias = 0.0;
    if (arch.stacked) {
        std::vector<Index> sizes = arch.branch_sizes;
        sizes.back() = 1;
        for (Index k = 0; k < p.latent_dim; ++k)
            p.branch.push_back(MlpParams::init(sizes, arch.activation, rng,
                                               Activation::Identity));
    } else {
        p.branch.push_back(MlpParams::init(arch.branch_sizes, arch.activation,
                                           rng, Activation::Identity));
    }
    p.trunk = MlpParams::init(arch.trunk_sizes, arch.activation, rng,
                              arch.activation);
    return p;
}

std::vector<ParamView> param_views(DeepONetParams& p, bool include_trunk) {
    std::vector<ParamView> views;
    for (auto& net : p.branch) {
        auto v = param_views(net);
        views.insert(views.end(), v.begin(), v.end());
    }
    if (include_trunk) {
        auto v = param_views(p.trunk);
        views.insert(views.end(), v.begin(), v.end());
    }
    if (p.has_output_bias) views.push_back({&p.output_bias, 1});
    return views;
}

double deeponet_forward(const DeepONetParams& p, const Vector& u,
                        const Vector& P) {
    Vector b(p.latent_dim);
    if (p.stacked) {
        for (Index k = 0; k < p.latent_dim; ++k)
            b(k) = mlp_forward(p.branch[k], u)(0);
    } else {
        b = mlp_forward(p.branch[0], u);
    }
    const Vector t = mlp_forward(p.trunk, P);
    double out = b.dot(t);
    if (p.has_output_bias) out += p.output_bias;
    return out;
}

std::string to_string(LossKind k) {
    return k == LossKind::MSE ? "mse" : "l2rel";
}

LossKind loss_kind_from_string(const std::string& s) {
    if (s == "mse") return LossKind::MSE;
    if (s == "l2rel" || s == "mean_l2_relative") return LossKind::MeanL2Relative;
    throw Error("unknown loss kind: " + s);
}

double loss_mse(const Vector& pred, const Vector& target) {
    if (pred.size() == 0 || pred.size() != target.size())
        throw ShapeError("loss_mse: empty or mismatched inputs");
    return (pred - target).squaredNorm() / static_cast<double>(pred.size());
}

double loss_mean_l2_relative(const std::vector<Vector>& preds,
                             const std::vector<Vector>& targets) {
    if (preds.empty() || preds.size() != targets.size())
        throw ShapeError("loss_mean_l2_relative: empty or mismatched groups");
    double acc = 0.0;
    for (std::size_t f = 0; f < preds.size(); ++f) {
        if (preds[f].size() == 0 || preds[f].size() != targets[f].size())
            throw ShapeError("loss_mean_l2_relative: bad group " +
                             std::to_string(f));
        const double denom = targets[f].norm();
        if (denom == 0.0)
            throw DegenerateError(
                "loss_mean_l2_relative: zero-norm target in group " +
                std::to_string(f));
        acc += (preds[f] - targets[f]).norm() / denom;
    }
    return acc / static_cast<double>(preds.size());
}

namespace {

// Uniform-group batch: function f owns flat rows [f*n_q, (f+1)*n_q).
struct Batch {
    Matrix U;       // n_fn x m
    Matrix P;       // aligned: n_q x d, unaligned: (n_fn*n_q) x d
    Vector s;       // flat targets, function-major
    bool aligned = true;
    Index n_fn = 0, n_q = 0;

    Index n_points() const { return n_fn * n_q; }
};

Batch make_batch(const OperatorDataset& d) {
    d.validate();
    Batch b;
    b.n_fn = d.n_functions();
    b.n_q = b.n_fn > 0 ? d.queries[0].rows() : 0;
    for (Index f = 0; f < b.n_fn; ++f)
        if (d.queries[f].rows() != b.n_q)
            throw ShapeError("train_deeponet: non-uniform query counts");
    b.aligned = d.layout == Layout::Aligned;
    b.U = d.inputs.values;
    if (b.aligned) {
        b.P = b.n_fn > 0 ? d.queries[0] : Matrix(0, d.query_dim);
    } else {
        b.P.resize(b.n_points(), d.query_dim);
        for (Index f = 0; f < b.n_fn; ++f)
            b.P.middleRows(f * b.n_q, b.n_q) = d.queries[f];
    }
    b.s.resize(b.n_points());
    for (Index f = 0; f < b.n_fn; ++f)
        b.s.segment(f * b.n_q, b.n_q) = d.targets[f];
    return b;
}

struct ForwardState {
    std::vector<MlpBatchCache> branch_caches;
    MlpBatchCache trunk_cache;
    Matrix B;     // n_fn x latent
    Matrix T;     // trunk rows x latent
    Vector pred;  // flat, function-major
};

void branch_forward(const DeepONetParams& p, const Matrix& U,
                    ForwardState& st) {
    if (p.stacked) {
        st.branch_caches.resize(p.branch.size());
        st.B.resize(U.rows(), p.latent_dim);
        for (Index k = 0; k < p.latent_dim; ++k)
            st.B.col(k) =
                mlp_forward_batch(p.branch[k], U, &st.branch_caches[k]);
    } else {
        st.branch_caches.resize(1);
        st.B = mlp_forward_batch(p.branch[0], U, &st.branch_caches[0]);
    }
}

void forward(const DeepONetParams& p, const Batch& b, ForwardState& st) {
    branch_forward(p, b.U, st);
    st.T = mlp_forward_batch(p.trunk, b.P, &st.trunk_cache);
    st.pred.resize(b.n_points());
    if (b.aligned) {
        // flat(f*n_q + r) = B.row(f) . T.row(r)
        Matrix S = st.B * st.T.transpose();  // n_fn x n_q
        for (Index f = 0; f < b.n_fn; ++f)
            st.pred.segment(f * b.n_q, b.n_q) = S.row(f).transpose();
    } else {
        parallel_for_chunks(b.n_points(), kRowChunk,
                            [&](Index, Index lo, Index hi) {
                                for (Index i = lo; i < hi; ++i)
                                    st.pred(i) =
                                        st.B.row(i / b.n_q).dot(st.T.row(i));
                            });
    }
    if (p.has_output_bias) st.pred.array() += p.output_bias;
}

// Loss over flat predictions plus its gradient d loss / d pred.
double loss_and_grad(LossKind kind, const Vector& pred, const Vector& target,
                     Index n_fn, Index n_q, Vector& dpred) {
    dpred.resize(pred.size());
    if (kind == LossKind::MSE) {
        const double inv = 1.0 / static_cast<double>(pred.size());
        dpred = 2.0 * inv * (pred - target);
        return (pred - target).squaredNorm() * inv;
    }
    // Mean L2 relative, grouped per function.
    double acc = 0.0;
    const double inv_fn = 1.0 / static_cast<double>(n_fn);
    for (Index f = 0; f < n_fn; ++f) {
        const auto r = pred.segment(f * n_q, n_q) - target.segment(f * n_q, n_q);
        const double rn = r.norm();
        const double tn = target.segment(f * n_q, n_q).norm();
        if (tn == 0.0)
            throw DegenerateError("train loss: zero-norm target group " +
                                  std::to_string(f));
        acc += rn / tn;
        if (rn > 0.0)
            dpred.segment(f * n_q, n_q) = r * (inv_fn / (rn * tn));
        else
            dpred.segment(f * n_q, n_q).setZero();
    }
    return acc * inv_fn;
}

double eval_loss(LossKind kind, const Vector& pred, const Vector& target,
                 Index n_fn, Index n_q) {
    if (kind == LossKind::MSE) return loss_mse(pred, target);
    std::vector<Vector> ps(n_fn), ts(n_fn);
    for (Index f = 0; f < n_fn; ++f) {
        ps[f] = pred.segment(f * n_q, n_q);
        ts[f] = target.segment(f * n_q, n_q);
    }
    return loss_mean_l2_relative(ps, ts);
}

struct Grads {
    std::vector<MlpGrads> branch;
    MlpGrads trunk;
    double dbias = 0.0;
};

std::vector<ParamView> grad_views_all(const DeepONetParams& p, Grads& g,
                                      bool include_trunk) {
    std::vector<ParamView> views;
    for (auto& net : g.branch) {
        auto v = grad_views(net);
        views.insert(views.end(), v.begin(), v.end());
    }
    if (include_trunk) {
        auto v = grad_views(g.trunk);
        views.insert(views.end(), v.begin(), v.end());
    }
    if (p.has_output_bias) views.push_back({&g.dbias, 1});
    return views;
}

void backward(const DeepONetParams& p, const Batch& b, const ForwardState& st,
              const Vector& dpred, bool include_trunk, Grads& g) {
    const Index l = p.latent_dim;
    Matrix dB(b.n_fn, l);
    Matrix dT;
    if (b.aligned) {
        Matrix dS(b.n_fn, b.n_q);
        for (Index f = 0; f < b.n_fn; ++f)
            dS.row(f) = dpred.segment(f * b.n_q, b.n_q).transpose();
        dB.noalias() = dS * st.T;
        dT.noalias() = dS.transpose() * st.B;
    } else {
        dT.resize(b.n_points(), l);
        parallel_for_chunks(b.n_points(), kRowChunk,
                            [&](Index, Index lo, Index hi) {
                                for (Index i = lo; i < hi; ++i)
                                    dT.row(i) = dpred(i) * st.B.row(i / b.n_q);
                            });
        parallel_for_chunks(b.n_fn, 64, [&](Index, Index lo, Index hi) {
            for (Index f = lo; f < hi; ++f) {
                Vector acc = Vector::Zero(l);
                for (Index r = 0; r < b.n_q; ++r)
                    acc += dpred(f * b.n_q + r) *
                           st.T.row(f * b.n_q + r).transpose();
                dB.row(f) = acc.transpose();
            }
        });
    }

    g.branch.resize(p.branch.size());
    if (p.stacked) {
        for (Index k = 0; k < l; ++k)
            mlp_backward_batch(p.branch[k], st.branch_caches[k], dB.col(k),
                               g.branch[k]);
    } else {
        mlp_backward_batch(p.branch[0], st.branch_caches[0], dB, g.branch[0]);
    }
    if (include_trunk) mlp_backward_batch(p.trunk, st.trunk_cache, dT, g.trunk);
    if (p.has_output_bias) g.dbias = dpred.sum();
}

}  // namespace

std::vector<Vector> predict_dataset(const DeepONetParams& p,
                                    const OperatorDataset& d) {
    const Batch b = make_batch(d);
    ForwardState st;
    forward(p, b, st);
    std::vector<Vector> out(b.n_fn);
    for (Index f = 0; f < b.n_fn; ++f)
        out[f] = st.pred.segment(f * b.n_q, b.n_q);
    return out;
}

void save_deeponet_checkpoint(const std::filesystem::path& path,
                              const DeepONetParams& p,
                              const nlohmann::json& extra) {
    Checkpoint ck;
    ck.header["kind"] = "deeponet";
    ck.header["stacked"] = p.stacked;
    ck.header["latent_dim"] = p.latent_dim;
    ck.header["output_bias"] = p.has_output_bias;
    nlohmann::json nets = nlohmann::json::array();
    for (const auto& net : p.branch) nets.push_back(mlp_header(net));
    ck.header["branch"] = nets;
    ck.header["trunk"] = mlp_header(p.trunk);
    for (auto it = extra.begin(); it != extra.end(); ++it)
        ck.header[it.key()] = it.value();

    for (const auto& net : p.branch) append_mlp_values(net, ck.values);
    append_mlp_values(p.trunk, ck.values);
    if (p.has_output_bias) ck.values.push_back(p.output_bias);
    ck.header["param_count"] = ck.values.size();
    save_checkpoint(path, ck);
}

DeepONetParams load_deeponet_checkpoint(const std::filesystem::path& path,
                                        nlohmann::json* header_out) {
    const Checkpoint ck = load_checkpoint(path);
    if (ck.header.value("kind", "") != "deeponet")
        throw IoError("not a deeponet checkpoint: " + path.string());
    DeepONetParams p;
    p.stacked = ck.header.at("stacked").get<bool>();
    p.latent_dim = ck.header.at("latent_dim").get<Index>();
    p.has_output_bias = ck.header.at("output_bias").get<bool>();
    std::size_t cursor = 0;
    for (const auto& h : ck.header.at("branch"))
        p.branch.push_back(mlp_from_header(h, ck.values, cursor));
    p.trunk = mlp_from_header(ck.header.at("trunk"), ck.values, cursor);
    if (p.has_output_bias) {
        if (cursor >= ck.values.size())
            throw IoError("checkpoint missing output bias value");
        p.output_bias = ck.values[cursor++];
    }
    if (cursor != ck.values.size())
        throw IoError("checkpoint has trailing values");
    if (header_out) *header_out = ck.header;
    return p;
}

TrainResult train_deeponet(const OperatorDataset& train,
                           const OperatorDataset* test,
                           const DeepONetArch& arch, const TrainConfig& cfg,
                           std::vector<TrainHistoryRow>* history_sink) {
    const Batch tb = make_batch(train);
    if (tb.U.cols() != arch.branch_sizes.front())
        throw ShapeError("train_deeponet: sensor count != branch input size");
    if (tb.P.cols() != arch.trunk_sizes.front())
        throw ShapeError("train_deeponet: query dim != trunk input size");

    Batch eb;
    if (test) eb = make_batch(*test);

    Rng rng(cfg.seed);
    TrainResult result;
    result.params = DeepONetParams::init(arch, rng);
    DeepONetParams& params = result.params;

    const bool update_trunk = !cfg.freeze_trunk;
    auto views = param_views(params, update_trunk);
    AdamConfig adam_cfg;
    adam_cfg.lr = cfg.lr;
    AdamState adam = AdamState::init(views, adam_cfg);

    ForwardState st, est;
    Grads grads;
    Vector dpred;

    auto log_row = [&](long long iter, double train_loss) {
        TrainHistoryRow row{iter, train_loss,
                            std::numeric_limits<double>::quiet_NaN(),
                            std::numeric_limits<double>::quiet_NaN()};
        if (test) {
            forward(params, eb, est);
            row.test_loss = eval_loss(cfg.loss, est.pred, eb.s, eb.n_fn, eb.n_q);
            row.test_metric =
                eval_loss(cfg.metric, est.pred, eb.s, eb.n_fn, eb.n_q);
        }
        result.history.push_back(row);
        if (history_sink) history_sink->push_back(row);
    };

    for (long long iter = 0;; ++iter) {
        forward(params, tb, st);
        const double train_loss =
            loss_and_grad(cfg.loss, st.pred, tb.s, tb.n_fn, tb.n_q, dpred);
        if (!std::isfinite(train_loss))
            throw DivergenceError("train_deeponet: non-finite loss at iteration " +
                                  std::to_string(iter));
        if (iter % cfg.log_every == 0 || iter == cfg.iterations)
            log_row(iter, train_loss);
        for (long long snap : cfg.snapshot_iterations)
            if (snap == iter) result.snapshots.emplace_back(iter, params);
        if (iter == cfg.iterations) break;

        backward(params, tb, st, dpred, update_trunk, grads);
        adam_step(adam, views, grad_views_all(params, grads, update_trunk));
    }
    return result;
}

}  // namespace onb
