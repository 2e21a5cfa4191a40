#include "onb/nn/adam.hpp"

#include <cmath>

namespace onb {

AdamState AdamState::init(const std::vector<ParamView>& params,
                          const AdamConfig& cfg) {
    AdamState s;
    s.cfg = cfg;
    s.first_moment.reserve(params.size());
    s.second_moment.reserve(params.size());
    for (const auto& p : params) {
        s.first_moment.push_back(Vector::Zero(p.size));
        s.second_moment.push_back(Vector::Zero(p.size));
    }
    return s;
}

void adam_step(AdamState& state, const std::vector<ParamView>& params,
               const std::vector<ParamView>& grads) {
    if (params.size() != state.first_moment.size() ||
        grads.size() != params.size())
        throw ShapeError("adam_step: block count mismatch");

    state.step_count += 1;
    const auto& c = state.cfg;
    const double corr1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.step_count));
    const double corr2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.step_count));

    for (std::size_t b = 0; b < params.size(); ++b) {
        if (params[b].size != grads[b].size ||
            params[b].size != state.first_moment[b].size())
            throw ShapeError("adam_step: block size mismatch");
        double* th = params[b].data;
        const double* g = grads[b].data;
        double* m = state.first_moment[b].data();
        double* v = state.second_moment[b].data();
        for (Index i = 0; i < params[b].size; ++i) {
            m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g[i];
            v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g[i] * g[i];
            const double m_hat = m[i] / corr1;
            const double v_hat = v[i] / corr2;
            th[i] -= c.lr * m_hat / (std::sqrt(v_hat) + c.epsilon);
        }
    }
}

}  // namespace onb
