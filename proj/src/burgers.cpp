#include "onb/solvers/burgers.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "onb/solvers/fft.hpp"

namespace onb {

namespace {

struct Spectral {
    Index n;
    double length;
    std::vector<double> k;       // signed wavenumbers
    std::vector<double> k2;      // k^2
    std::vector<bool> keep;      // 2/3-rule dealiasing mask

    explicit Spectral(Index n_, double length_) : n(n_), length(length_) {
        k.resize(n);
        k2.resize(n);
        keep.resize(n);
        const double base = 2.0 * std::numbers::pi / length;
        for (Index i = 0; i < n; ++i) {
            const Index m = i <= n / 2 ? i : i - n;
            k[i] = base * static_cast<double>(m);
            k2[i] = k[i] * k[i];
            keep[i] = std::abs(m) <= n / 3;
        }
    }
};

// Nonlinear term N(s_hat) = -(i k / 2) F(s^2), dealiased.
// Also reports max |s| of the physical field it evaluated.
std::vector<Complex> nonlinear(const Spectral& sp,
                               const std::vector<Complex>& s_hat,
                               double* max_abs_s) {
    std::vector<Complex> s_phys = ifft(s_hat);
    double peak = 0.0;
    for (auto& v : s_phys) {
        const double re = v.real();
        peak = std::max(peak, std::abs(re));
        v = Complex(re * re, 0.0);
    }
    if (max_abs_s) *max_abs_s = peak;
    std::vector<Complex> sq_hat = fft(s_phys);
    for (Index i = 0; i < sp.n; ++i) {
        if (!sp.keep[i]) {
            sq_hat[i] = Complex(0, 0);
            continue;
        }
        sq_hat[i] *= Complex(0.0, -0.5 * sp.k[i]);
    }
    return sq_hat;
}

}  // namespace

Grid2D solve_burgers(const std::function<double(double)>& u0,
                     const BurgersConfig& cfg) {
    const Index n = cfg.internal_n;
    const double length = cfg.x_hi - cfg.x_lo;
    const double dx = length / static_cast<double>(n);
    Spectral sp(n, length);

    std::vector<Complex> s_hat(n);
    {
        std::vector<Complex> s0(n);
        for (Index i = 0; i < n; ++i)
            s0[i] = Complex(u0(cfg.x_lo + dx * static_cast<double>(i)), 0.0);
        s_hat = fft(s0);
    }

    Grid2D out;
    out.nx = cfg.out_nx;
    out.nt = cfg.out_nt;
    out.x_lo = cfg.x_lo; out.x_hi = cfg.x_hi;
    out.t_lo = 0.0; out.t_hi = cfg.t_hi;
    out.values.resize(cfg.out_nx, cfg.out_nt);

    // Phase table for evaluating the truncated series on the output grid.
    const Vector x_out = out.xs();
    std::vector<std::vector<Complex>> phase(cfg.out_nx,
                                            std::vector<Complex>(n));
    for (Index p = 0; p < cfg.out_nx; ++p)
        for (Index i = 0; i < n; ++i) {
            const double ang = sp.k[i] * (x_out(p) - cfg.x_lo);
            phase[p][i] = Complex(std::cos(ang), std::sin(ang));
        }
    auto write_column = [&](Index col) {
        const double inv_n = 1.0 / static_cast<double>(n);
        for (Index p = 0; p < cfg.out_nx; ++p) {
            Complex acc(0, 0);
            for (Index i = 0; i < n; ++i) acc += s_hat[i] * phase[p][i];
            out.values(p, col) = acc.real() * inv_n;
        }
    };
    write_column(0);

    const Vector t_out = out.ts();
    for (Index j = 1; j < cfg.out_nt; ++j) {
        const double span = t_out(j) - t_out(j - 1);

        double smax = 0.0;
        nonlinear(sp, s_hat, &smax);  // probe max |s| at interval start
        double dt_cfl = smax > 0.0 ? cfg.cfl_safety * dx / smax : span;
        const int n_sub = std::max(1, static_cast<int>(std::ceil(span / dt_cfl)));
        const double h = span / n_sub;

        // Integrating-factor exponentials for half and full steps.
        std::vector<double> e_half(n), e_full(n);
        for (Index i = 0; i < n; ++i) {
            e_half[i] = std::exp(-cfg.nu * sp.k2[i] * h * 0.5);
            e_full[i] = e_half[i] * e_half[i];
        }

        double observed_max = smax;
        for (int sub = 0; sub < n_sub; ++sub) {
            double m1 = 0, m2 = 0, m3 = 0, m4 = 0;
            std::vector<Complex> a = nonlinear(sp, s_hat, &m1);
            std::vector<Complex> tmp(n);
            for (Index i = 0; i < n; ++i)
                tmp[i] = e_half[i] * (s_hat[i] + 0.5 * h * a[i]);
            std::vector<Complex> b = nonlinear(sp, tmp, &m2);
            for (Index i = 0; i < n; ++i)
                tmp[i] = e_half[i] * s_hat[i] + 0.5 * h * b[i];
            std::vector<Complex> c = nonlinear(sp, tmp, &m3);
            for (Index i = 0; i < n; ++i)
                tmp[i] = e_full[i] * s_hat[i] + e_half[i] * h * c[i];
            std::vector<Complex> d = nonlinear(sp, tmp, &m4);
            for (Index i = 0; i < n; ++i)
                s_hat[i] = e_full[i] * s_hat[i] +
                           h / 6.0 *
                               (e_full[i] * a[i] +
                                2.0 * e_half[i] * (b[i] + c[i]) + d[i]);
            observed_max = std::max({observed_max, m1, m2, m3, m4});
            if (!std::isfinite(observed_max))
                throw NumericError("solve_burgers: non-finite spectrum near t = " +
                                   std::to_string(t_out(j)));
        }
        // The step size was chosen from the field at interval start; if the
        // field grew enough to void the CFL margin entirely, stop.
        if (observed_max * h > dx)
            throw NumericError("solve_burgers: CFL violation near t = " +
                               std::to_string(t_out(j)));
        write_column(j);
    }
    return out;
}

}  // namespace onb
