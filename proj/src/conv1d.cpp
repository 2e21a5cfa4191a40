#include "onb/nn/conv1d.hpp"

#include <string>

#include "onb/nn/dense.hpp"

namespace onb {

Conv1dLayer Conv1dLayer::init(Index in_channels, Index out_channels,
                              Index kernel_len, Index stride, Rng& rng) {
    Conv1dLayer layer;
    layer.stride = stride;
    layer.kernels.reserve(out_channels);
    // Glorot fans follow the receptive field, as for a dense layer over it.
    const Index fan_in = in_channels * kernel_len;
    Matrix flat = glorot_init(fan_in, out_channels, rng);
    for (Index o = 0; o < out_channels; ++o) {
        Matrix k(in_channels, kernel_len);
        for (Index c = 0; c < in_channels; ++c)
            for (Index t = 0; t < kernel_len; ++t)
                k(c, t) = flat(o, c * kernel_len + t);
        layer.kernels.push_back(std::move(k));
    }
    layer.bias = Vector::Zero(out_channels);
    return layer;
}

Matrix conv1d_forward(const Conv1dLayer& layer, const Matrix& x) {
    if (x.rows() != layer.in_channels())
        throw ShapeError("conv1d_forward: expected " +
                         std::to_string(layer.in_channels()) +
                         " input channels, got " + std::to_string(x.rows()));
    if (x.cols() < layer.kernel_len())
        throw ShapeError("conv1d_forward: kernel longer than input");

    const Index n_out = layer.out_len(x.cols());
    Matrix y(layer.out_channels(), n_out);
    for (Index o = 0; o < layer.out_channels(); ++o) {
        const Matrix& k = layer.kernels[o];
        for (Index j = 0; j < n_out; ++j) {
            double acc = layer.bias(o);
            const Index base = j * layer.stride;
            for (Index c = 0; c < layer.in_channels(); ++c)
                for (Index t = 0; t < layer.kernel_len(); ++t)
                    acc += k(c, t) * x(c, base + t);
            y(o, j) = acc;
        }
    }
    return y;
}

void conv1d_backward(const Conv1dLayer& layer, const Matrix& x,
                     const Matrix& dOut, Conv1dGrads& grads, Matrix* dX) {
    const Index n_out = layer.out_len(x.cols());
    if (dOut.rows() != layer.out_channels() || dOut.cols() != n_out)
        throw ShapeError("conv1d_backward: dOut shape mismatch");

    grads.dK.assign(layer.out_channels(),
                    Matrix::Zero(layer.in_channels(), layer.kernel_len()));
    grads.db = Vector::Zero(layer.out_channels());
    if (dX) *dX = Matrix::Zero(x.rows(), x.cols());

    for (Index o = 0; o < layer.out_channels(); ++o) {
        for (Index j = 0; j < n_out; ++j) {
            const double g = dOut(o, j);
            grads.db(o) += g;
            const Index base = j * layer.stride;
            for (Index c = 0; c < layer.in_channels(); ++c)
                for (Index t = 0; t < layer.kernel_len(); ++t) {
                    grads.dK[o](c, t) += g * x(c, base + t);
                    if (dX) (*dX)(c, base + t) += g * layer.kernels[o](c, t);
                }
        }
    }
}

}  // namespace onb
