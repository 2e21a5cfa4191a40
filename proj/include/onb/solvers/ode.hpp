#pragma once

#include <functional>

#include "onb/common.hpp"

namespace onb {

/// Antiderivative problem: s' = u on (0, 1], s(0) = 0.
struct OdeSolution {
    Vector xs;     // n_steps + 1 nodes over [0, 1]
    Vector s;      // s at the nodes, s[0] = 0
    Vector u_ref;  // driving input row when solved from sensor values; else empty
};

/// Classical RK4 with n_steps uniform steps.
OdeSolution solve_antiderivative(const std::function<double(double)>& u,
                                 int n_steps = 1000);

/// Same, with u given as sensor values (piecewise-linear in between).
OdeSolution solve_antiderivative(const Eigen::Ref<const Vector>& u_values,
                                 const Vector& sensors, int n_steps = 1000);

}  // namespace onb
