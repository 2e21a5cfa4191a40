#include <doctest.h>

#include <cmath>
#include <numbers>

#include "onb/grf.hpp"
#include "onb/solvers/burgers.hpp"
#include "onb/solvers/diffusion.hpp"
#include "onb/solvers/ode.hpp"
#include "support/test_helpers.hpp"

using namespace onb;
using std::numbers::pi;

TEST_CASE("rk4: polynomial and zero sources are exact") {
    const OdeSolution one = solve_antiderivative([](double) { return 1.0; });
    for (Index i = 0; i < one.xs.size(); ++i)
        CHECK(one.s(i) == doctest::Approx(one.xs(i)).epsilon(1e-14));
    CHECK(one.s(0) == 0.0);

    const OdeSolution zero = solve_antiderivative([](double) { return 0.0; });
    CHECK(zero.s.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("rk4: analytic antiderivative oracle for cos(2 pi x)") {
    const OdeSolution sol =
        solve_antiderivative([](double x) { return std::cos(2 * pi * x); });
    double err = 0.0;
    for (Index i = 0; i < sol.xs.size(); ++i)
        err = std::max(err,
                       std::abs(sol.s(i) - std::sin(2 * pi * sol.xs(i)) / (2 * pi)));
    CHECK(err <= 1e-9);
}

TEST_CASE("rk4: fourth-order convergence") {
    auto max_err = [](int n) {
        const OdeSolution sol =
            solve_antiderivative([](double x) { return std::cos(2 * pi * x); }, n);
        double err = 0.0;
        for (Index i = 0; i < sol.xs.size(); ++i)
            err = std::max(err, std::abs(sol.s(i) -
                                         std::sin(2 * pi * sol.xs(i)) / (2 * pi)));
        return err;
    };
    const double factor = max_err(50) / max_err(100);
    CHECK(factor >= 12.0);
    CHECK(factor <= 20.0);
}

TEST_CASE("rk4: sensor-row overload keeps the driving row") {
    GrfConfig g;
    const Vector sensors = sensor_grid(g);
    Vector row(100);
    for (Index i = 0; i < 100; ++i) row(i) = std::sin(sensors(i));
    const OdeSolution sol = solve_antiderivative(row, sensors);
    CHECK(sol.u_ref == row);
    CHECK(sol.s(0) == 0.0);
    CHECK(sol.xs.size() == 1001);
}

TEST_CASE("diffusion: zero source stays zero") {
    const Grid2D g = solve_diffusion_reaction([](double) { return 0.0; });
    CHECK(g.values.cwiseAbs().maxCoeff() == 0.0);
    CHECK(g.nx == 100);
    CHECK(g.nt == 100);
}

TEST_CASE("diffusion: constant source gives x-symmetric solutions") {
    const Grid2D g = solve_diffusion_reaction([](double) { return 1.0; });
    for (Index j = 0; j < g.nt; j += 11)
        for (Index i = 0; i < g.nx; ++i)
            CHECK(std::abs(g.values(i, j) - g.values(g.nx - 1 - i, j)) <= 1e-12);
    // Source actually drives the field away from zero.
    CHECK(g.values.cwiseAbs().maxCoeff() > 0.05);
}

TEST_CASE("diffusion: grid-refinement oracle") {
    GrfConfig cfg;
    cfg.length_scale = 0.2;
    const InputFunctionSet u = sample_functions(cfg, 1, 77);
    const auto fn = make_interpolant(u.values.row(0), u.sensors);

    DiffusionConfig coarse;
    const Grid2D a = solve_diffusion_reaction(fn, coarse);
    DiffusionConfig fine = coarse;
    fine.refine = 4;
    const Grid2D b = solve_diffusion_reaction(fn, fine);
    CHECK((a.values - b.values).cwiseAbs().maxCoeff() <= 1e-3);
}

TEST_CASE("diffusion: superlinear reaction blow-up is detected") {
    CHECK_THROWS_AS(solve_diffusion_reaction([](double) { return 1e4; }),
                    NumericError);
}

TEST_CASE("burgers: constants are exact solutions") {
    const Grid2D g = solve_burgers([](double) { return 0.75; });
    CHECK((g.values.array() - 0.75).abs().maxCoeff() <= 1e-12);
}

TEST_CASE("burgers: momentum conserved, energy non-increasing") {
    GrfConfig cfg;
    cfg.domain_lo = 0.0;
    cfg.domain_hi = 10.0;
    cfg.length_scale = 1.0;
    cfg.kernel = GrfKernel::PeriodicRBF;
    const InputFunctionSet u = sample_functions(cfg, 2, 31);

    for (Index f = 0; f < 2; ++f) {
        const Grid2D g =
            solve_burgers(make_interpolant(u.values.row(f), u.sensors));
        // Periodic quadrature over the output grid: x0 and x99 coincide, so
        // the trapezoid rule is a uniform 99-point period sum.
        auto integral = [&](auto&& f_of_v) {
            Vector acc = Vector::Zero(g.nt);
            const double h = 10.0 / (g.nx - 1);
            for (Index j = 0; j < g.nt; ++j) {
                double s = 0;
                for (Index i = 0; i + 1 < g.nx; ++i) s += f_of_v(g.values(i, j));
                acc(j) = s * h;
            }
            return acc;
        };
        const Vector momentum = integral([](double v) { return v; });
        const double scale = std::max(1e-12, std::abs(momentum(0)));
        for (Index j = 1; j < g.nt; ++j)
            CHECK(std::abs(momentum(j) - momentum(0)) <= 1e-8 * scale);

        const Vector energy = integral([](double v) { return v * v; });
        for (Index j = 1; j < g.nt; ++j)
            CHECK(energy(j) <= energy(j - 1) * (1.0 + 1e-10));
    }
}

TEST_CASE("burgers: Cole-Hopf closed form for a sine initial condition") {
    const BurgersConfig cfg;
    const Grid2D g =
        solve_burgers([](double x) { return std::sin(2 * pi * x / 10.0); }, cfg);
    const Vector xs = g.xs(), ts = g.ts();
    double worst = 0.0;
    // Subsampled here; the acceptance suite sweeps the full grid.
    for (Index j = 0; j < g.nt; j += 9)
        for (Index i = 0; i < g.nx; i += 7) {
            const double ref =
                testing::burgers_cole_hopf(xs(i), ts(j), cfg.nu, 10.0);
            worst = std::max(worst, std::abs(g.values(i, j) - ref));
        }
    CHECK(worst <= 1e-3);
}
