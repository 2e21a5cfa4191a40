#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>

#include "onb/grf.hpp"
#include "support/test_helpers.hpp"

using namespace onb;

TEST_CASE("kernel_matrix: diagonal, closed-form off-diagonal, symmetry, PD") {
    GrfConfig cfg;
    cfg.n_sensors = 100;
    cfg.length_scale = 0.2;
    cfg.jitter = 1e-10;
    const Vector sensors = sensor_grid(cfg);
    const Matrix K = kernel_matrix(sensors, cfg.length_scale, GrfKernel::RBF,
                                   cfg.jitter, 1.0);

    for (Index i = 0; i < K.rows(); ++i)
        CHECK(K(i, i) == doctest::Approx(1.0 + cfg.jitter).epsilon(1e-14));

    // Two sensors one length scale apart.
    Vector two(2);
    two << 0.0, 0.2;
    const Matrix K2 = kernel_matrix(two, 0.2, GrfKernel::RBF, 0.0, 1.0);
    CHECK(K2(0, 1) == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));

    CHECK((K - K.transpose()).cwiseAbs().maxCoeff() <= 1e-15);
    Eigen::SelfAdjointEigenSolver<Matrix> es(K);
    CHECK(es.eigenvalues().minCoeff() > 0.0);

    CHECK_THROWS_AS(kernel_matrix(two, -1.0, GrfKernel::RBF, 0.0, 1.0), Error);
}

TEST_CASE("sample_functions: empty set, determinism, moments") {
    GrfConfig cfg;
    cfg.n_sensors = 100;
    cfg.length_scale = 0.2;

    const InputFunctionSet empty = sample_functions(cfg, 0, 9);
    CHECK(empty.values.rows() == 0);
    CHECK(empty.sensors.size() == 100);
    CHECK(empty.seed == 9);

    const InputFunctionSet a = sample_functions(cfg, 25, 123);
    const InputFunctionSet b = sample_functions(cfg, 25, 123);
    CHECK(a.values == b.values);

    // Monte-Carlo moment check at every sensor over 1e4 draws.
    const InputFunctionSet big = sample_functions(cfg, 10000, 7);
    for (Index j = 0; j < cfg.n_sensors; j += 9) {
        const double mean = big.values.col(j).mean();
        const double var =
            big.values.col(j).array().square().mean() - mean * mean;
        CHECK(std::abs(mean) <= 0.05);
        CHECK(std::abs(var - 1.0) <= 0.1);
    }
}

TEST_CASE("sample covariance converges to the kernel entry") {
    GrfConfig cfg;
    cfg.n_sensors = 50;
    cfg.length_scale = 0.2;
    const int n = 100000;
    const InputFunctionSet s = sample_functions(cfg, n, 2024);
    const Matrix K = kernel_matrix(s.sensors, cfg.length_scale, cfg.kernel,
                                   cfg.jitter, 1.0);
    for (auto [i, j] : std::vector<std::pair<Index, Index>>{
             {0, 1}, {5, 20}, {10, 49}}) {
        const double cov =
            (s.values.col(i).array() * s.values.col(j).array()).mean();
        const double se = std::sqrt((1.0 + K(i, j) * K(i, j)) / n);
        CHECK(std::abs(cov - K(i, j)) <= 3.0 * se);
    }
}

TEST_CASE("periodic kernel wraps the covariance") {
    GrfConfig cfg;
    cfg.n_sensors = 100;
    cfg.domain_lo = 0.0;
    cfg.domain_hi = 10.0;
    cfg.length_scale = 1.0;
    cfg.kernel = GrfKernel::PeriodicRBF;
    const Vector sensors = sensor_grid(cfg);
    const Matrix K = kernel_matrix(sensors, cfg.length_scale, cfg.kernel,
                                   cfg.jitter, 10.0);
    // First and last sensors are one period apart: fully correlated.
    CHECK(K(0, cfg.n_sensors - 1) == doctest::Approx(1.0).epsilon(1e-12));

    const InputFunctionSet s = sample_functions(cfg, 200, 5);
    const Vector diff =
        s.values.col(0) - s.values.col(cfg.n_sensors - 1);
    CHECK(diff.cwiseAbs().maxCoeff() <= 1e-3);
}

TEST_CASE("evaluate_function: nodes, midpoints, interpolation error bound") {
    GrfConfig cfg;
    cfg.n_sensors = 100;
    const Vector sensors = sensor_grid(cfg);

    Vector vals(100);
    for (Index i = 0; i < 100; ++i) vals(i) = sensors(i) * sensors(i);

    for (Index i = 0; i < 100; i += 13)
        CHECK(evaluate_function(vals, sensors, sensors(i)) == vals(i));

    Vector two_vals = Vector::Zero(100);
    two_vals(3) = 1.0;
    two_vals(4) = 3.0;
    const double mid = 0.5 * (sensors(3) + sensors(4));
    CHECK(evaluate_function(two_vals, sensors, mid) ==
          doctest::Approx(2.0).epsilon(1e-12));

    // f(x) = x^2: max linear-interp error is (dx^2 / 8) * max|f''| = dx^2/4.
    const double dx = sensors(1) - sensors(0);
    const double bound = dx * dx / 8.0 * 2.0;
    const double approx = evaluate_function(vals, sensors, 0.505);
    CHECK(std::abs(approx - 0.505 * 0.505) <= bound + 1e-15);

    CHECK_THROWS_AS(evaluate_function(vals, sensors, -0.01), RangeError);
    CHECK_THROWS_AS(evaluate_function(vals, sensors, 1.01), RangeError);
}
