#pragma once

#include <functional>

#include "onb/solvers/grid.hpp"

namespace onb {

/// Viscous Burgers: s_t + s s_x = nu s_xx on x in (0, L), t in (0, T],
/// periodic in x, with s(x, 0) = u0(x).
struct BurgersConfig {
    double nu = 0.01;
    double x_lo = 0.0, x_hi = 10.0;
    double t_hi = 10.0;
    Index out_nx = 100;
    Index out_nt = 100;
    Index internal_n = 128;  // power of two for the FFT
    double cfl_safety = 0.5;
};

/// Fourier pseudo-spectral in space (2/3-rule dealiasing), RK4 in time with
/// an integrating factor for the diffusion term. Output values are the
/// truncated Fourier series evaluated on the output grid.
Grid2D solve_burgers(const std::function<double(double)>& u0,
                     const BurgersConfig& cfg = {});

}  // namespace onb
