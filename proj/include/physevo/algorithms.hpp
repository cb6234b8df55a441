#pragma once

#include <optional>
#include <string>
#include <vector>

#include "physevo/archive.hpp"
#include "physevo/constraints.hpp"
#include "physevo/problem.hpp"
#include "physevo/rng.hpp"

namespace physevo {

enum class Variant { DE, PSO, GA, ES };

Variant variant_from_string(const std::string& s);
std::string variant_to_string(Variant v);

struct OptimizerConfig {
    Variant variant = Variant::DE;
    int population_size = 40;
    std::uint64_t max_evaluations = 10000;
    std::optional<double> target_objective;
    int stagnation_window = 50;
    double stagnation_improvement = 1e-12;
    int fidelity = 0;

    // DE
    double de_F = 0.5;
    double de_CR = 0.9;
    // PSO (global-best topology, velocity clamped to 20% of box width)
    double pso_w = 0.7;
    double pso_c1 = 1.5;
    double pso_c2 = 1.5;
    // GA (tournament + SBX + polynomial mutation, elitist generational)
    double ga_crossover_prob = 0.9;
    double ga_sbx_eta = 15.0;
    double ga_mutation_prob = -1.0;  // < 0 means 1/dim
    double ga_mutation_eta = 20.0;
    // ES (rank-weighted recombination, cumulative step-size adaptation)
    int es_lambda = 0;  // 0 means population_size
    int es_mu = 0;      // 0 means lambda/2
    double es_initial_step = 0.3;  // fraction of box width

    BoundsPolicy bounds_policy = BoundsPolicy::Reflect;
    double penalty_coefficient = 0.0;  // for feasible-vs-feasible comparison

    void validate(std::size_t dim) const;

    friend bool operator==(const OptimizerConfig&, const OptimizerConfig&) = default;
};

enum class TerminationReason { BudgetExhausted, TargetReached, Stagnation };

struct IterationTrace {
    int iteration = 0;
    double best_objective = 0.0;  // best-so-far under the lexicographic comparator
    double mean_objective = 0.0;
    double diversity = 0.0;  // mean per-dimension std over the population
};

struct RunResult {
    SolutionVector best_vector;
    EvalResult best_result;
    std::vector<IterationTrace> trace;
    std::uint64_t evaluations_used = 0;
    TerminationReason termination = TerminationReason::BudgetExhausted;
};

struct Population {
    std::vector<SolutionVector> members;
    std::vector<EvalResult> fitness;
    int iteration = 0;
};

/// Seeds are copied verbatim to the front; the remainder is uniform in bounds.
/// Seeds violating bounds or dimension raise.
Population initialize_population(const OptimizerConfig& config, const Bounds& bounds,
                                 const std::vector<SolutionVector>& seeds, RngStream& rng);

/// Full optimization loop. Every evaluation is appended to `archive` as run
/// `run_id`. Evaluations may be dispatched concurrently (PHYSEVO_THREADS);
/// archive order and all results are independent of the thread count.
RunResult run_optimizer(const Problem& problem, const OptimizerConfig& config,
                        const std::vector<SolutionVector>& seeds, RngStream rng,
                        EvaluationArchive& archive, int run_id = 0);

}  // namespace physevo
