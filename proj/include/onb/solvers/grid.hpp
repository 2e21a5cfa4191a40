#pragma once

#include "onb/common.hpp"

namespace onb {

/// Space-time field on a uniform grid; values(i, j) = s(x_i, t_j).
struct Grid2D {
    Index nx = 0, nt = 0;
    double x_lo = 0, x_hi = 1;
    double t_lo = 0, t_hi = 1;
    Matrix values;  // nx x nt

    Vector xs() const { return linspace(x_lo, x_hi, nx); }
    Vector ts() const { return linspace(t_lo, t_hi, nt); }
};

}  // namespace onb
