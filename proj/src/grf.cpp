#include "onb/grf.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <memory>

#include "onb/rng.hpp"

namespace onb {

std::string to_string(GrfKernel k) {
    return k == GrfKernel::RBF ? "rbf" : "periodic_rbf";
}

GrfKernel grf_kernel_from_string(const std::string& s) {
    if (s == "rbf") return GrfKernel::RBF;
    if (s == "periodic_rbf" || s == "periodic") return GrfKernel::PeriodicRBF;
    throw Error("unknown GRF kernel: " + s);
}

Vector sensor_grid(const GrfConfig& cfg) {
    return linspace(cfg.domain_lo, cfg.domain_hi, cfg.n_sensors);
}

Matrix kernel_matrix(const Vector& sensors, double length_scale,
                     GrfKernel kernel, double jitter, double period) {
    if (length_scale <= 0.0)
        throw Error("kernel_matrix: length_scale must be positive");
    const Index m = sensors.size();
    const double inv = 1.0 / (2.0 * length_scale * length_scale);
    Matrix K(m, m);
    for (Index i = 0; i < m; ++i) {
        for (Index j = 0; j <= i; ++j) {
            double d = std::abs(sensors(i) - sensors(j));
            if (kernel == GrfKernel::PeriodicRBF) d = std::min(d, period - d);
            const double v = std::exp(-d * d * inv);
            K(i, j) = v;
            K(j, i) = v;
        }
        K(i, i) += jitter;
    }
    return K;
}

InputFunctionSet sample_functions(const GrfConfig& cfg, Index n_functions,
                                  std::uint64_t seed) {
    InputFunctionSet set;
    set.config = cfg;
    set.seed = seed;
    set.sensors = sensor_grid(cfg);

    const Matrix K = kernel_matrix(set.sensors, cfg.length_scale, cfg.kernel,
                                   cfg.jitter, cfg.domain_hi - cfg.domain_lo);
    // Cholesky when the jittered kernel is numerically positive definite.
    // Very smooth kernels (notably the periodic one, whose trailing
    // eigenvalues underflow) break triangular pivots, so fall back to a
    // symmetric square-root factor with sub-roundoff negatives clamped.
    Matrix L;
    Eigen::LLT<Matrix> llt(K);
    if (llt.info() == Eigen::Success) {
        L = llt.matrixL();
    } else {
        Eigen::SelfAdjointEigenSolver<Matrix> es(K);
        const Vector& ev = es.eigenvalues();
        if (es.info() != Eigen::Success ||
            ev.minCoeff() < -1e-8 * std::max(1.0, ev.maxCoeff()))
            throw NumericError(
                "sample_functions: kernel matrix is not positive definite "
                "after jitter");
        L = es.eigenvectors() * ev.cwiseMax(0.0).cwiseSqrt().asDiagonal();
    }

    set.values.resize(n_functions, cfg.n_sensors);
    Rng root(seed);
    parallel_for_chunks(n_functions, 64, [&](Index, Index b, Index e) {
        Vector z(cfg.n_sensors);
        for (Index r = b; r < e; ++r) {
            Rng row_rng = root.derive(static_cast<std::uint64_t>(r));
            for (Index i = 0; i < cfg.n_sensors; ++i) z(i) = row_rng.normal();
            set.values.row(r) = (L * z).transpose();
        }
    });
    return set;
}

double evaluate_function(const Eigen::Ref<const Vector>& fn_values,
                         const Vector& sensors, double x) {
    const Index m = sensors.size();
    if (fn_values.size() != m)
        throw ShapeError("evaluate_function: row length != sensor count");
    const double lo = sensors(0), hi = sensors(m - 1);
    // Tiny slack absorbs roundoff from grid arithmetic at the endpoints.
    const double eps = 1e-12 * std::max(1.0, std::abs(hi - lo));
    if (x < lo - eps || x > hi + eps)
        throw RangeError("evaluate_function: x outside domain");
    if (x <= lo) return fn_values(0);
    if (x >= hi) return fn_values(m - 1);

    const double step = (hi - lo) / static_cast<double>(m - 1);
    Index i = static_cast<Index>((x - lo) / step);
    if (i >= m - 1) i = m - 2;
    const double x0 = sensors(i), x1 = sensors(i + 1);
    const double w = (x - x0) / (x1 - x0);
    return (1.0 - w) * fn_values(i) + w * fn_values(i + 1);
}

std::function<double(double)> make_interpolant(
    const Eigen::Ref<const Vector>& fn_values, const Vector& sensors) {
    auto row = std::make_shared<Vector>(fn_values);
    auto grid = std::make_shared<Vector>(sensors);
    return [row, grid](double x) { return evaluate_function(*row, *grid, x); };
}

}  // namespace onb
