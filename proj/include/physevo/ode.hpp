#pragma once

#include <functional>
#include <vector>

#include "physevo/types.hpp"

namespace physevo {

/// Dense ODE solution: states.row-like layout, states[i] is the state at times[i].
struct Trajectory {
    std::vector<double> times;
    std::vector<std::vector<double>> states;
};

using OdeRhs = std::function<void(double t, const std::vector<double>& x, std::vector<double>& dx)>;

/// Classic fixed-step RK4 on a uniform grid over [t0, tf]; requested sample
/// times are produced by linear interpolation between grid points.
/// Throws NonFiniteState with the offending time on blow-up.
Trajectory integrate_fixed_rk4(const OdeRhs& rhs, const std::vector<double>& x0, double t0, double tf,
                               int step_count, const std::vector<double>& sample_times);

}  // namespace physevo
