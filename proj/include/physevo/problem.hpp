#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "physevo/types.hpp"

namespace physevo {

/// Evaluation contract every problem fulfils: objective + constraint
/// violations at a requested fidelity level. Evaluations are pure functions
/// of (problem config, x, fidelity); eval_index bookkeeping is the caller's.
class Problem {
  public:
    virtual ~Problem() = default;

    virtual std::string name() const = 0;
    virtual std::size_t dim() const = 0;
    virtual Bounds bounds() const = 0;
    virtual int fidelity_levels() const { return 1; }

    /// Problem-provided seed solutions for the optimizer (may be empty).
    virtual std::vector<SolutionVector> seeds() const { return {}; }

    EvalResult evaluate(const SolutionVector& x, int fidelity = 0) const {
        if (x.size() != dim())
            throw DimensionMismatch(name() + ": genotype dim " + std::to_string(x.size()) +
                                    " != " + std::to_string(dim()));
        if (!all_finite(x)) throw NonFiniteInput(name() + ": non-finite genotype entry");
        if (fidelity < 0 || fidelity >= fidelity_levels())
            throw UnknownFidelity(name() + ": fidelity " + std::to_string(fidelity));
        EvalResult r = evaluate_impl(x, fidelity);
        r.fidelity = fidelity;
        return r;
    }

  protected:
    virtual EvalResult evaluate_impl(const SolutionVector& x, int fidelity) const = 0;
};

/// Analytic smoke-test family used for optimizer sanity checks.
class SphereProblem final : public Problem {
  public:
    explicit SphereProblem(std::size_t n, double half_width = 5.0) : n_(n), hw_(half_width) {}
    std::string name() const override { return "sphere"; }
    std::size_t dim() const override { return n_; }
    Bounds bounds() const override { return Bounds::uniform(n_, -hw_, hw_); }

  protected:
    EvalResult evaluate_impl(const SolutionVector& x, int) const override {
        double s = 0.0;
        for (double v : x) s += v * v;
        return EvalResult{s, {}, {}, 0, 0};
    }

  private:
    std::size_t n_;
    double hw_;
};

class RosenbrockProblem final : public Problem {
  public:
    explicit RosenbrockProblem(std::size_t n) : n_(n) {}
    std::string name() const override { return "rosenbrock"; }
    std::size_t dim() const override { return n_; }
    Bounds bounds() const override { return Bounds::uniform(n_, -5.0, 10.0); }

  protected:
    EvalResult evaluate_impl(const SolutionVector& x, int) const override {
        double s = 0.0;
        for (std::size_t i = 0; i + 1 < x.size(); ++i) {
            const double a = x[i + 1] - x[i] * x[i];
            const double b = 1.0 - x[i];
            s += 100.0 * a * a + b * b;
        }
        return EvalResult{s, {}, {}, 0, 0};
    }

  private:
    std::size_t n_;
};

class RastriginProblem final : public Problem {
  public:
    explicit RastriginProblem(std::size_t n) : n_(n) {}
    std::string name() const override { return "rastrigin"; }
    std::size_t dim() const override { return n_; }
    Bounds bounds() const override { return Bounds::uniform(n_, -5.12, 5.12); }

  protected:
    EvalResult evaluate_impl(const SolutionVector& x, int) const override {
        double s = 10.0 * static_cast<double>(x.size());
        for (double v : x) s += v * v - 10.0 * std::cos(6.283185307179586 * v);
        return EvalResult{s, {}, {}, 0, 0};
    }

  private:
    std::size_t n_;
};

}  // namespace physevo
