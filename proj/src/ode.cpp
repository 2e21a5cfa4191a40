#include "onb/solvers/ode.hpp"

#include "onb/grf.hpp"

namespace onb {

OdeSolution solve_antiderivative(const std::function<double(double)>& u,
                                 int n_steps) {
    OdeSolution sol;
    sol.xs = linspace(0.0, 1.0, n_steps + 1);
    sol.s.resize(n_steps + 1);
    sol.s(0) = 0.0;
    const double h = 1.0 / static_cast<double>(n_steps);
    double s = 0.0;
    for (int i = 0; i < n_steps; ++i) {
        const double x = sol.xs(i);
        const double k1 = u(x);
        const double k2 = u(x + 0.5 * h);
        const double k3 = k2;  // s' does not depend on s
        const double k4 = u(x + h);
        s += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        sol.s(i + 1) = s;
    }
    return sol;
}

OdeSolution solve_antiderivative(const Eigen::Ref<const Vector>& u_values,
                                 const Vector& sensors, int n_steps) {
    OdeSolution sol =
        solve_antiderivative(make_interpolant(u_values, sensors), n_steps);
    sol.u_ref = u_values;
    return sol;
}

}  // namespace onb
