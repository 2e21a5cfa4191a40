#pragma once

#include <vector>

#include "onb/common.hpp"
#include "onb/rng.hpp"

namespace onb {

/// 1-D convolution layer (cross-correlation, PyTorch convention).
/// Input and output are channel-major: (channels x length).
struct Conv1dLayer {
    std::vector<Matrix> kernels;  // out_channels entries of (in_channels x kernel_len)
    Vector bias;                  // out_channels
    Index stride = 1;

    Index out_channels() const { return static_cast<Index>(kernels.size()); }
    Index in_channels() const { return kernels.empty() ? 0 : kernels[0].rows(); }
    Index kernel_len() const { return kernels.empty() ? 0 : kernels[0].cols(); }
    Index out_len(Index input_len) const {
        return (input_len - kernel_len()) / stride + 1;
    }

    static Conv1dLayer init(Index in_channels, Index out_channels,
                            Index kernel_len, Index stride, Rng& rng);
};

Matrix conv1d_forward(const Conv1dLayer& layer, const Matrix& x);

struct Conv1dGrads {
    std::vector<Matrix> dK;
    Vector db;
};

/// dOut is (out_channels x out_len). Gradients are overwritten.
void conv1d_backward(const Conv1dLayer& layer, const Matrix& x,
                     const Matrix& dOut, Conv1dGrads& grads,
                     Matrix* dX = nullptr);

}  // namespace onb
