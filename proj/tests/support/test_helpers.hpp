#pragma once

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "onb/common.hpp"

namespace onb::testing {

/// Fresh scratch directory under the system temp dir, removed on destruction.
class TempDir {
  public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("onb_" + tag + "_" + std::to_string(++counter) + "_" +
                 std::to_string(::getpid()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }

  private:
    std::filesystem::path path_;
};

/// O(n^2) reference DFT (forward, unscaled).
inline std::vector<std::complex<double>> naive_dft(
    const std::vector<std::complex<double>>& v) {
    const std::size_t n = v.size();
    std::vector<std::complex<double>> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> acc(0, 0);
        for (std::size_t j = 0; j < n; ++j) {
            const double ang = -2.0 * std::numbers::pi *
                               static_cast<double>(k * j) /
                               static_cast<double>(n);
            acc += v[j] * std::complex<double>(std::cos(ang), std::sin(ang));
        }
        out[k] = acc;
    }
    return out;
}

/// Central finite difference of a scalar function of one coordinate.
inline double central_diff(const std::function<double()>& f, double* coord,
                           double h = 1e-6) {
    const double saved = *coord;
    *coord = saved + h;
    const double fp = f();
    *coord = saved - h;
    const double fm = f();
    *coord = saved;
    return (fp - fm) / (2.0 * h);
}

/// Fraction of coordinates where two gradients agree to rel_tol, with a
/// floor that ignores coordinates below abs_floor.
inline double gradient_agreement(const std::vector<double>& a,
                                 const std::vector<double>& b,
                                 double rel_tol = 1e-5,
                                 double abs_floor = 1e-7) {
    std::size_t ok = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double scale = std::max({std::abs(a[i]), std::abs(b[i]), abs_floor});
        if (std::abs(a[i] - b[i]) / scale <= rel_tol ||
            std::abs(a[i] - b[i]) <= abs_floor)
            ++ok;
    }
    return a.empty() ? 1.0 : static_cast<double>(ok) / a.size();
}

/// Closed-form viscous Burgers solution for the periodic initial condition
/// u0(x) = sin(2 pi x / L) via the Cole-Hopf transformation, evaluated by
/// high-resolution quadrature with a log-sum-exp guard:
///   s(x,t) = int (x-y)/t e^{-G/(2 nu)} dy / int e^{-G/(2 nu)} dy,
///   G(y) = int_0^y u0 + (x-y)^2 / (2t).
inline double burgers_cole_hopf(double x, double t, double nu, double length) {
    const double b = 2.0 * std::numbers::pi / length;
    if (t <= 0.0) return std::sin(b * x);
    const auto F = [&](double y) { return (1.0 - std::cos(b * y)) / b; };

    const double half_width = 15.0;
    const int n = 12000;  // even, for composite Simpson
    const double h = 2.0 * half_width / n;

    std::vector<double> g(n + 1), w(n + 1);
    double gmax = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= n; ++i) {
        const double y = x - half_width + i * h;
        g[i] = -(F(y) + (x - y) * (x - y) / (2.0 * t)) / (2.0 * nu);
        gmax = std::max(gmax, g[i]);
    }
    double num = 0.0, den = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double y = x - half_width + i * h;
        const double simpson = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        const double weight = simpson * std::exp(g[i] - gmax);
        num += weight * (x - y) / t;
        den += weight;
    }
    return num / den;
}

}  // namespace onb::testing
