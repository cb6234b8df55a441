#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "physevo/rng.hpp"
#include "physevo/types.hpp"

namespace physevo {

enum class BoundsPolicy { Clamp, Reflect, Resample };

/// Hard constraints report violation magnitude (0 when satisfied), soft
/// constraints report a penalty folded into the objective with weight w.
struct ConstraintSet {
    std::vector<std::function<double(const SolutionVector&)>> hard;
    struct Soft {
        std::function<double(const SolutionVector&)> fn;
        double weight = 1.0;
    };
    std::vector<Soft> soft;
    BoundsPolicy bounds_policy = BoundsPolicy::Reflect;
};

std::vector<double> violation_vector(const ConstraintSet& cs, const SolutionVector& x);

/// Static-penalty aggregation: objective + sum(w_k * soft_k) + R * sum(hard).
double penalized_objective(const EvalResult& r, double penalty_coefficient);

/// Feasibility rules: feasible beats infeasible; infeasible ordered by total
/// violation; feasible ordered by penalized objective; ties by eval_index.
/// Returns <0 if a is preferred, >0 if b is preferred, 0 if identical keys.
int lexicographic_compare(const EvalResult& a, const EvalResult& b, double penalty_coefficient = 0.0);

inline bool prefers(const EvalResult& a, const EvalResult& b, double penalty_coefficient = 0.0) {
    return lexicographic_compare(a, b, penalty_coefficient) < 0;
}

SolutionVector repair_bounds(const SolutionVector& x, const Bounds& b, BoundsPolicy policy, RngStream& rng);

}  // namespace physevo
