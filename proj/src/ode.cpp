#include "physevo/ode.hpp"

#include <algorithm>
#include <cmath>

#include "physevo/errors.hpp"

namespace physevo {

namespace {

bool finite_state(const std::vector<double>& x) {
    for (double v : x)
        if (!std::isfinite(v)) return false;
    return true;
}

}  // namespace

Trajectory integrate_fixed_rk4(const OdeRhs& rhs, const std::vector<double>& x0, double t0, double tf,
                               int step_count, const std::vector<double>& sample_times) {
    if (tf <= t0) throw Error("integrate_fixed_rk4: tf must exceed t0");
    if (step_count < 1) throw Error("integrate_fixed_rk4: step_count must be >= 1");
    for (double ts : sample_times)
        if (ts < t0 || ts > tf) throw Error("integrate_fixed_rk4: sample time outside [t0, tf]");

    const std::size_t m = x0.size();
    const double h = (tf - t0) / step_count;

    std::vector<std::vector<double>> grid(static_cast<std::size_t>(step_count) + 1);
    grid[0] = x0;

    std::vector<double> k1(m), k2(m), k3(m), k4(m), tmp(m);
    std::vector<double> x = x0;
    for (int s = 0; s < step_count; ++s) {
        const double t = t0 + s * h;
        rhs(t, x, k1);
        for (std::size_t i = 0; i < m; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
        rhs(t + 0.5 * h, tmp, k2);
        for (std::size_t i = 0; i < m; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
        rhs(t + 0.5 * h, tmp, k3);
        for (std::size_t i = 0; i < m; ++i) tmp[i] = x[i] + h * k3[i];
        rhs(t + h, tmp, k4);
        for (std::size_t i = 0; i < m; ++i) x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        if (!finite_state(x)) throw NonFiniteState("integration blow-up", t + h);
        grid[static_cast<std::size_t>(s) + 1] = x;
    }

    Trajectory out;
    out.times = sample_times;
    out.states.reserve(sample_times.size());
    for (double ts : sample_times) {
        double u = (ts - t0) / h;
        auto idx = static_cast<std::size_t>(std::min(std::max(std::floor(u), 0.0), double(step_count - 1)));
        const double frac = u - static_cast<double>(idx);
        std::vector<double> xi(m);
        for (std::size_t i = 0; i < m; ++i)
            xi[i] = grid[idx][i] + frac * (grid[idx + 1][i] - grid[idx][i]);
        out.states.push_back(std::move(xi));
    }
    return out;
}

}  // namespace physevo
