#include "physevo/constraints.hpp"

#include <algorithm>

namespace physevo {

std::vector<double> violation_vector(const ConstraintSet& cs, const SolutionVector& x) {
    std::vector<double> out;
    out.reserve(cs.hard.size());
    for (const auto& g : cs.hard) out.push_back(std::max(0.0, g(x)));
    return out;
}

double penalized_objective(const EvalResult& r, double penalty_coefficient) {
    double p = r.objective;
    for (double s : r.soft_penalties) p += s;  // weights already applied upstream
    p += penalty_coefficient * r.total_violation();
    return p;
}

int lexicographic_compare(const EvalResult& a, const EvalResult& b, double penalty_coefficient) {
    const bool fa = a.feasible();
    const bool fb = b.feasible();
    if (fa != fb) return fa ? -1 : 1;
    if (!fa) {
        const double va = a.total_violation();
        const double vb = b.total_violation();
        if (va != vb) return va < vb ? -1 : 1;
    } else {
        const double pa = penalized_objective(a, penalty_coefficient);
        const double pb = penalized_objective(b, penalty_coefficient);
        if (pa != pb) return pa < pb ? -1 : 1;
    }
    if (a.eval_index != b.eval_index) return a.eval_index < b.eval_index ? -1 : 1;
    return 0;
}

SolutionVector repair_bounds(const SolutionVector& x, const Bounds& b, BoundsPolicy policy, RngStream& rng) {
    SolutionVector y = x;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double lo = b.lower[i];
        const double hi = b.upper[i];
        if (y[i] >= lo && y[i] <= hi) continue;
        switch (policy) {
            case BoundsPolicy::Clamp:
                y[i] = std::clamp(y[i], lo, hi);
                break;
            case BoundsPolicy::Reflect: {
                const double w = hi - lo;
                if (w <= 0.0) {
                    y[i] = lo;
                    break;
                }
                // fold about the violated face until inside
                double v = y[i];
                double t = std::fmod(v - lo, 2.0 * w);
                if (t < 0.0) t += 2.0 * w;
                y[i] = (t <= w) ? lo + t : lo + 2.0 * w - t;
                break;
            }
            case BoundsPolicy::Resample:
                y[i] = rng.uniform(lo, hi);
                break;
        }
    }
    return y;
}

}  // namespace physevo
