#pragma once

#include <functional>

#include "onb/solvers/grid.hpp"

namespace onb {

/// s_t = D s_xx + k s^2 + u(x) on x in (0,1), t in (0,1], with s(x,0) = 0
/// and zero Dirichlet boundaries.
struct DiffusionConfig {
    double diffusivity = 0.01;    // D
    double reaction_rate = 0.05;  // k
    Index out_nx = 100;
    Index out_nt = 100;
    /// Spatial refinement of the internal grid relative to the output grid:
    /// internal nx = refine * (out_nx - 1) + 1. Output nodes stay exact.
    int refine = 1;
    double stability_factor = 0.25;  // D dt / dx^2 cap
    double reaction_dt_cap = 0.1;    // k |s| dt cap
    double blowup_threshold = 1e6;
};

/// Explicit forward-Euler with automatic sub-stepping; steps land exactly on
/// the output times. Throws NumericError when |s| exceeds the blow-up guard.
Grid2D solve_diffusion_reaction(const std::function<double(double)>& u,
                                const DiffusionConfig& cfg = {});

}  // namespace onb
