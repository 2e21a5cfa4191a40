#pragma once

#include <vector>

#include "onb/common.hpp"
#include "onb/nn/dense.hpp"

namespace onb {

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct AdamState {
    std::vector<Vector> first_moment;
    std::vector<Vector> second_moment;
    long long step_count = 0;
    AdamConfig cfg;

    static AdamState init(const std::vector<ParamView>& params,
                          const AdamConfig& cfg = {});
};

/// Bias-corrected Adam update, applied in place to params.
/// params/grads must match the block layout the state was built from.
void adam_step(AdamState& state, const std::vector<ParamView>& params,
               const std::vector<ParamView>& grads);

}  // namespace onb
