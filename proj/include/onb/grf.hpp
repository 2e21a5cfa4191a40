#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "onb/common.hpp"

namespace onb {

enum class GrfKernel { RBF, PeriodicRBF };

std::string to_string(GrfKernel k);
GrfKernel grf_kernel_from_string(const std::string& s);

struct GrfConfig {
    Index n_sensors = 100;
    double domain_lo = 0.0;
    double domain_hi = 1.0;
    double length_scale = 0.2;
    GrfKernel kernel = GrfKernel::RBF;
    double jitter = 1e-10;
};

/// Uniform sensor grid over [lo, hi], endpoints included.
Vector sensor_grid(const GrfConfig& cfg);

/// Squared-exponential covariance over the sensor set, jitter added on the
/// diagonal. PeriodicRBF uses the wrapped distance with period = hi - lo.
Matrix kernel_matrix(const Vector& sensors, double length_scale,
                     GrfKernel kernel, double jitter, double period);

struct InputFunctionSet {
    Matrix values;   // n_functions x n_sensors
    Vector sensors;  // n_sensors
    GrfConfig config;
    std::uint64_t seed = 0;

    Index n_functions() const { return values.rows(); }
    Index n_sensors() const { return sensors.size(); }
};

/// Zero-mean draws: row = L z with L the Cholesky factor of the kernel
/// matrix and z standard normal from a per-row derived stream, so any row is
/// reproducible from (config, seed) alone.
InputFunctionSet sample_functions(const GrfConfig& cfg, Index n_functions,
                                  std::uint64_t seed);

/// Piecewise-linear interpolation between sensors; exact at sensor nodes.
/// Throws RangeError outside [sensors.front(), sensors.back()].
double evaluate_function(const Eigen::Ref<const Vector>& fn_values,
                         const Vector& sensors, double x);

/// Callable wrapper around evaluate_function (copies the row).
std::function<double(double)> make_interpolant(
    const Eigen::Ref<const Vector>& fn_values, const Vector& sensors);

}  // namespace onb
