#include <doctest.h>

#include <cmath>
#include <cstring>

#include "onb/io.hpp"
#include "onb/nn/adam.hpp"
#include "onb/nn/checkpoint.hpp"
#include "onb/nn/conv1d.hpp"
#include "onb/nn/dense.hpp"
#include "support/test_helpers.hpp"

using namespace onb;

namespace {

// Forward pass written independently of the library path: explicit loops.
Vector naive_mlp_forward(const MlpParams& p, const Vector& x) {
    Vector h = x;
    for (const auto& layer : p.layers) {
        Vector z(layer.out_size());
        for (Index r = 0; r < layer.out_size(); ++r) {
            double acc = layer.bias(r);
            for (Index c = 0; c < layer.in_size(); ++c)
                acc += layer.weights(r, c) * h(c);
            z(r) = acc;
        }
        for (Index r = 0; r < z.size(); ++r) z(r) = activate(layer.activation, z(r));
        h = z;
    }
    return h;
}

std::vector<double> flatten_params(const MlpParams& p) {
    std::vector<double> v;
    append_mlp_values(p, v);
    return v;
}

// MSE of an MLP over a small batch, used as the scalar objective for
// finite-difference checks.
double batch_mse(const MlpParams& p, const Matrix& X, const Vector& y) {
    const Matrix out = mlp_forward_batch(p, X);
    return (out.col(0) - y).squaredNorm() / static_cast<double>(y.size());
}

}  // namespace

TEST_CASE("glorot: bound, shape, determinism") {
    Rng rng(7);
    const Matrix w = glorot_init(100, 40, rng);
    CHECK(w.rows() == 40);
    CHECK(w.cols() == 100);
    const double limit = std::sqrt(6.0 / 140.0);
    CHECK(w.cwiseAbs().maxCoeff() <= limit);

    Rng rng2(7);
    const Matrix w2 = glorot_init(100, 40, rng2);
    CHECK(w == w2);

    CHECK_THROWS_AS(glorot_init(0, 4, rng), ShapeError);
}

TEST_CASE("glorot: empirical variance matches 2/(fan_in+fan_out)") {
    Rng rng(11);
    const Index fi = 100, fo = 100;
    const Matrix w = glorot_init(fi, fo, rng);  // 1e4 samples
    const double var = w.array().square().mean() - std::pow(w.mean(), 2);
    const double expected = 2.0 / static_cast<double>(fi + fo);
    CHECK(std::abs(var - expected) <= 0.05 * expected);
}

TEST_CASE("mlp_forward: degenerate cases") {
    // Zero weights, identity activation: output equals the last bias.
    MlpParams p;
    p.layer_sizes = {3, 2, 4};
    p.layers.resize(2);
    p.layers[0] = {Matrix::Zero(2, 3), Vector::Constant(2, 0.5), Activation::Identity};
    p.layers[1] = {Matrix::Zero(4, 2), (Vector(4) << 1, 2, 3, 4).finished(),
                   Activation::Identity};
    const Vector out = mlp_forward(p, (Vector(3) << 9, 9, 9).finished());
    CHECK(out == (Vector(4) << 1, 2, 3, 4).finished());

    // Single identity layer, W = I, b = 0.
    MlpParams id;
    id.layer_sizes = {3, 3};
    id.layers = {{Matrix::Identity(3, 3), Vector::Zero(3), Activation::Identity}};
    const Vector x = (Vector(3) << -1, 0.25, 7).finished();
    CHECK(mlp_forward(id, x) == x);

    // Single ReLU layer clamps a negative pre-activation.
    MlpParams relu;
    relu.layer_sizes = {1, 1};
    relu.layers = {{Matrix::Constant(1, 1, 1.0), Vector::Constant(1, -2.0),
                    Activation::ReLU}};
    CHECK(mlp_forward(relu, Vector::Constant(1, 1.0))(0) == 0.0);

    CHECK_THROWS_AS(mlp_forward(relu, Vector::Zero(2)), ShapeError);
}

TEST_CASE("mlp_forward matches an independent naive routine") {
    Rng rng(21);
    for (Activation act : {Activation::ReLU, Activation::Tanh}) {
        MlpParams p = MlpParams::init({5, 8, 7, 3}, act, rng);
        for (int trial = 0; trial < 20; ++trial) {
            Vector x(5);
            for (Index i = 0; i < 5; ++i) x(i) = rng.normal();
            const Vector a = mlp_forward(p, x);
            const Vector b = naive_mlp_forward(p, x);
            CHECK((a - b).cwiseAbs().maxCoeff() <=
                  1e-12 * std::max(1.0, b.cwiseAbs().maxCoeff()));
        }
    }
}

TEST_CASE("batched forward equals per-sample forward") {
    Rng rng(31);
    MlpParams p = MlpParams::init({4, 6, 2}, Activation::ReLU, rng);
    Matrix X(9, 4);
    for (Index i = 0; i < X.size(); ++i) X(i / 4, i % 4) = rng.normal();
    const Matrix out = mlp_forward_batch(p, X);
    for (Index r = 0; r < X.rows(); ++r) {
        const Vector single = mlp_forward(p, X.row(r).transpose());
        CHECK((out.row(r).transpose() - single).cwiseAbs().maxCoeff() <= 1e-14);
    }
}

TEST_CASE("gradients: constant loss gives zero gradients") {
    Rng rng(41);
    MlpParams p = MlpParams::init({3, 5, 2}, Activation::Tanh, rng);
    Matrix X(4, 3);
    for (Index i = 0; i < X.size(); ++i) X(i / 3, i % 3) = rng.normal();
    MlpBatchCache cache;
    mlp_forward_batch(p, X, &cache);
    MlpGrads g;
    mlp_backward_batch(p, cache, Matrix::Zero(4, 2), g);
    for (const auto& layer : g.layers) {
        CHECK(layer.dW.cwiseAbs().maxCoeff() == 0.0);
        CHECK(layer.db.cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("gradients: closed-form least-squares gradient of a linear layer") {
    // Single linear layer, one sample: d/dW of (Wx+b-y)^2 = 2(Wx+b-y) x^T.
    Rng rng(43);
    MlpParams p = MlpParams::init({3, 1}, Activation::ReLU, rng,
                                  Activation::Identity);
    const Vector x = (Vector(3) << 0.5, -1.25, 2.0).finished();
    const double y = 0.7;
    const double pred = mlp_forward(p, x)(0);

    MlpBatchCache cache;
    mlp_forward_batch(p, x.transpose(), &cache);
    MlpGrads g;
    mlp_backward_batch(p, cache, Matrix::Constant(1, 1, 2.0 * (pred - y)), g);

    const Matrix expected = 2.0 * (pred - y) * x.transpose();
    CHECK((g.layers[0].dW - expected).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(std::abs(g.layers[0].db(0) - 2.0 * (pred - y)) <= 1e-12);
}

TEST_CASE("gradients: finite differences across activations") {
    Rng rng(47);
    for (Activation act :
         {Activation::ReLU, Activation::Tanh, Activation::Identity}) {
        MlpParams p = MlpParams::init({4, 7, 6, 1}, act, rng);
        Matrix X(5, 4);
        Vector y(5);
        for (Index i = 0; i < X.size(); ++i) X(i / 4, i % 4) = rng.normal();
        for (Index i = 0; i < 5; ++i) y(i) = rng.normal();

        MlpBatchCache cache;
        const Matrix out = mlp_forward_batch(p, X, &cache);
        MlpGrads g;
        const Matrix dOut =
            (2.0 / 5.0) * (out.col(0) - y);
        mlp_backward_batch(p, cache, dOut, g);

        std::vector<double> ad;
        for (auto& layer : g.layers) {
            for (Index i = 0; i < layer.dW.size(); ++i)
                ad.push_back(layer.dW.data()[i]);
            for (Index i = 0; i < layer.db.size(); ++i) ad.push_back(layer.db(i));
        }
        std::vector<double> fd;
        auto objective = [&] { return batch_mse(p, X, y); };
        for (auto& layer : p.layers) {
            for (Index i = 0; i < layer.weights.size(); ++i)
                fd.push_back(testing::central_diff(objective,
                                                   layer.weights.data() + i));
            for (Index i = 0; i < layer.bias.size(); ++i)
                fd.push_back(testing::central_diff(objective,
                                                   layer.bias.data() + i));
        }
        CHECK(testing::gradient_agreement(ad, fd) >= 0.99);
    }
}

TEST_CASE("conv1d: identity and affine scalar kernels") {
    Conv1dLayer layer;
    layer.kernels = {Matrix::Constant(1, 1, 1.0)};
    layer.bias = Vector::Zero(1);
    layer.stride = 1;
    Matrix x(1, 4);
    x << 1, 2, 3, 4;
    CHECK(conv1d_forward(layer, x) == x);

    layer.kernels[0](0, 0) = 2.0;
    layer.bias(0) = 1.0;
    Matrix x1(1, 1);
    x1 << 3;
    CHECK(conv1d_forward(layer, x1)(0, 0) == 7.0);

    Matrix too_short(1, 0);
    CHECK_THROWS_AS(conv1d_forward(layer, Matrix(2, 4)), ShapeError);
}

TEST_CASE("conv1d: output length and brute-force cross-correlation oracle") {
    Rng rng(53);
    Conv1dLayer layer = Conv1dLayer::init(2, 3, 2, 2, rng);
    Matrix x(2, 5);
    for (Index i = 0; i < x.size(); ++i) x(i / 5, i % 5) = rng.normal();
    const Matrix y = conv1d_forward(layer, x);
    CHECK(y.rows() == 3);
    CHECK(y.cols() == (5 - 2) / 2 + 1);

    for (Index o = 0; o < 3; ++o)
        for (Index j = 0; j < y.cols(); ++j) {
            double acc = layer.bias(o);
            for (Index c = 0; c < 2; ++c)
                for (Index t = 0; t < 2; ++t)
                    acc += layer.kernels[o](c, t) * x(c, j * 2 + t);
            CHECK(std::abs(y(o, j) - acc) <= 1e-12);
        }

    CHECK_THROWS_AS(conv1d_forward(layer, Matrix::Zero(2, 1)), ShapeError);
}

TEST_CASE("conv1d: finite-difference gradient check") {
    Rng rng(59);
    Conv1dLayer layer = Conv1dLayer::init(2, 3, 2, 1, rng);
    Matrix x(2, 6);
    for (Index i = 0; i < x.size(); ++i) x(i / 6, i % 6) = rng.normal();
    const Index on = layer.out_len(x.cols());
    Matrix target(3, on);
    for (Index i = 0; i < target.size(); ++i) target(i / on, i % on) = rng.normal();

    auto objective = [&] {
        const Matrix y = conv1d_forward(layer, x);
        return (y - target).squaredNorm();
    };
    const Matrix y0 = conv1d_forward(layer, x);
    Conv1dGrads g;
    Matrix dX;
    conv1d_backward(layer, x, 2.0 * (y0 - target), g, &dX);

    std::vector<double> ad, fd;
    for (Index o = 0; o < 3; ++o)
        for (Index i = 0; i < g.dK[o].size(); ++i) {
            ad.push_back(g.dK[o].data()[i]);
            fd.push_back(testing::central_diff(objective,
                                               layer.kernels[o].data() + i));
        }
    for (Index o = 0; o < 3; ++o) {
        ad.push_back(g.db(o));
        fd.push_back(testing::central_diff(objective, layer.bias.data() + o));
    }
    for (Index i = 0; i < x.size(); ++i) {
        ad.push_back(dX.data()[i]);
        fd.push_back(testing::central_diff(objective, x.data() + i));
    }
    CHECK(testing::gradient_agreement(ad, fd) >= 0.99);
}

TEST_CASE("adam: zero gradients are a fixed point") {
    Rng rng(61);
    MlpParams p = MlpParams::init({3, 4, 2}, Activation::ReLU, rng);
    const std::vector<double> before = flatten_params(p);
    auto views = param_views(p);
    AdamState state = AdamState::init(views);
    MlpGrads g = MlpGrads::zeros_like(p);
    for (int i = 0; i < 5; ++i) adam_step(state, views, grad_views(g));
    CHECK(flatten_params(p) == before);
    CHECK(state.step_count == 5);
}

TEST_CASE("adam: first-step magnitude is close to the learning rate") {
    double theta = 3.0;
    const double g = 0.5;
    std::vector<ParamView> pv{{&theta, 1}};
    AdamConfig cfg;
    AdamState state = AdamState::init(pv, cfg);
    double grad = g;
    std::vector<ParamView> gv{{&grad, 1}};
    adam_step(state, pv, gv);
    const double step = std::abs(theta - 3.0);
    CHECK(step == doctest::Approx(cfg.lr).epsilon(1e-6));
}

TEST_CASE("adam: converges on a scalar quadratic") {
    double theta = 1.0;
    std::vector<ParamView> pv{{&theta, 1}};
    AdamConfig cfg;
    cfg.lr = 0.1;
    AdamState state = AdamState::init(pv, cfg);
    double prev = std::abs(theta);
    bool monotone_after_warmup = true;
    for (int i = 0; i < 200; ++i) {
        double grad = 2.0 * theta;
        std::vector<ParamView> gv{{&grad, 1}};
        adam_step(state, pv, gv);
        if (i >= 10 && std::abs(theta) > prev) monotone_after_warmup = false;
        prev = std::abs(theta);
    }
    CHECK(std::abs(theta) < 1e-2);
    CHECK(monotone_after_warmup);
}

TEST_CASE("determinism: identical seed and config give bit-identical training") {
    auto run = [] {
        Rng rng(77);
        MlpParams p = MlpParams::init({3, 5, 1}, Activation::ReLU, rng);
        Matrix X(6, 3);
        Vector y(6);
        for (Index i = 0; i < X.size(); ++i) X(i / 3, i % 3) = rng.normal();
        for (Index i = 0; i < 6; ++i) y(i) = rng.normal();
        auto views = param_views(p);
        AdamState state = AdamState::init(views);
        MlpBatchCache cache;
        MlpGrads g;
        for (int it = 0; it < 50; ++it) {
            const Matrix out = mlp_forward_batch(p, X, &cache);
            const Matrix dOut = (2.0 / 6.0) * (out.col(0) - y);
            mlp_backward_batch(p, cache, dOut, g);
            adam_step(state, views, grad_views(g));
        }
        return flatten_params(p);
    };
    CHECK(run() == run());
}

TEST_CASE("checkpoint: mlp round trip is bit-exact") {
    testing::TempDir tmp("ckpt");
    Rng rng(83);
    MlpParams p = MlpParams::init({4, 9, 3}, Activation::Tanh, rng,
                                  Activation::ReLU);
    Checkpoint ck;
    ck.header["kind"] = "mlp";
    ck.header["mlp"] = mlp_header(p);
    append_mlp_values(p, ck.values);
    ck.header["param_count"] = ck.values.size();
    ck.header["seed"] = 83;
    ck.header["step_count"] = 0;
    save_checkpoint(tmp.path() / "m.ckpt", ck);

    const Checkpoint back = load_checkpoint(tmp.path() / "m.ckpt");
    CHECK(back.header.at("seed") == 83);
    std::size_t cursor = 0;
    const MlpParams q = mlp_from_header(back.header.at("mlp"), back.values, cursor);
    CHECK(cursor == back.values.size());
    REQUIRE(q.layers.size() == p.layers.size());
    for (std::size_t l = 0; l < p.layers.size(); ++l) {
        CHECK(q.layers[l].weights == p.layers[l].weights);
        CHECK(q.layers[l].bias == p.layers[l].bias);
        CHECK(q.layers[l].activation == p.layers[l].activation);
    }

    // Truncated blob is reported, not silently accepted.
    const std::string bytes = read_file_bytes(tmp.path() / "m.ckpt");
    atomic_write_file(tmp.path() / "trunc.ckpt",
                      bytes.substr(0, bytes.size() - 9));
    CHECK_THROWS_AS(load_checkpoint(tmp.path() / "trunc.ckpt"), IoError);
}
