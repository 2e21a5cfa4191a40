#include "onb/solvers/diffusion.hpp"

#include <cmath>
#include <vector>

namespace onb {

Grid2D solve_diffusion_reaction(const std::function<double(double)>& u,
                                const DiffusionConfig& cfg) {
    const Index nxi = static_cast<Index>(cfg.refine) * (cfg.out_nx - 1) + 1;
    const double dx = 1.0 / static_cast<double>(nxi - 1);
    const double D = cfg.diffusivity;
    const double k = cfg.reaction_rate;

    Vector src(nxi);
    for (Index i = 0; i < nxi; ++i) src(i) = u(static_cast<double>(i) * dx);

    Grid2D out;
    out.nx = cfg.out_nx;
    out.nt = cfg.out_nt;
    out.x_lo = 0; out.x_hi = 1;
    out.t_lo = 0; out.t_hi = 1;
    out.values.resize(cfg.out_nx, cfg.out_nt);

    Vector s = Vector::Zero(nxi);
    Vector snew(nxi);
    const Vector t_out = out.ts();
    out.values.col(0).setZero();  // s(x, 0) = 0

    const double diff_cap = cfg.stability_factor * dx * dx / D;
    for (Index j = 1; j < cfg.out_nt; ++j) {
        const double span = t_out(j) - t_out(j - 1);
        const double smax = s.cwiseAbs().maxCoeff();
        double dt_cap = diff_cap;
        if (k * smax > 0.0)
            dt_cap = std::min(dt_cap, cfg.reaction_dt_cap / (k * smax));
        const int n_sub = std::max(1, static_cast<int>(std::ceil(span / dt_cap)));
        const double dt = span / n_sub;

        for (int sub = 0; sub < n_sub; ++sub) {
            snew(0) = 0.0;
            snew(nxi - 1) = 0.0;
            for (Index i = 1; i < nxi - 1; ++i) {
                const double lap = (s(i - 1) - 2.0 * s(i) + s(i + 1)) / (dx * dx);
                snew(i) = s(i) + dt * (D * lap + k * s(i) * s(i) + src(i));
            }
            s.swap(snew);
            const double peak = s.cwiseAbs().maxCoeff();
            if (!std::isfinite(peak) || peak > cfg.blowup_threshold)
                throw NumericError(
                    "solve_diffusion_reaction: solution blew up near t = " +
                    std::to_string(t_out(j)));
        }
        for (Index i = 0; i < cfg.out_nx; ++i)
            out.values(i, j) = s(static_cast<Index>(cfg.refine) * i);
    }
    return out;
}

}  // namespace onb
