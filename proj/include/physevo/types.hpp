#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "physevo/errors.hpp"

namespace physevo {

/// Genotype for every problem: a bounded real vector.
using SolutionVector = std::vector<double>;

inline bool all_finite(const SolutionVector& x) {
    for (double v : x)
        if (!std::isfinite(v)) return false;
    return true;
}

struct Bounds {
    SolutionVector lower;
    SolutionVector upper;

    std::size_t dim() const { return lower.size(); }

    bool contains(const SolutionVector& x) const {
        if (x.size() != lower.size()) return false;
        for (std::size_t i = 0; i < x.size(); ++i)
            if (x[i] < lower[i] || x[i] > upper[i]) return false;
        return true;
    }

    static Bounds uniform(std::size_t dim, double lo, double hi) {
        return Bounds{SolutionVector(dim, lo), SolutionVector(dim, hi)};
    }
};

struct EvalResult {
    double objective = 0.0;
    std::vector<double> hard_violations;
    std::vector<double> soft_penalties;
    int fidelity = 0;
    std::uint64_t eval_index = 0;

    double total_violation() const {
        double s = 0.0;
        for (double v : hard_violations) s += v;
        return s;
    }

    bool feasible() const { return total_violation() == 0.0; }
};

}  // namespace physevo
