#include "physevo/algorithms.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <thread>

#include "physevo/errors.hpp"

namespace physevo {

Variant variant_from_string(const std::string& s) {
    if (s == "DE" || s == "de") return Variant::DE;
    if (s == "PSO" || s == "pso") return Variant::PSO;
    if (s == "GA" || s == "ga") return Variant::GA;
    if (s == "ES" || s == "es") return Variant::ES;
    throw InvalidVariantParameters("unknown optimizer variant: " + s);
}

std::string variant_to_string(Variant v) {
    switch (v) {
        case Variant::DE: return "DE";
        case Variant::PSO: return "PSO";
        case Variant::GA: return "GA";
        case Variant::ES: return "ES";
    }
    return "?";
}

void OptimizerConfig::validate(std::size_t) const {
    if (population_size < 2) throw InvalidVariantParameters("population_size must be >= 2");
    if (variant == Variant::DE && population_size < 4)
        throw InvalidVariantParameters("DE needs population_size >= 4");
    if (max_evaluations <= static_cast<std::uint64_t>(population_size))
        throw InvalidVariantParameters("max_evaluations must exceed population_size");
    if (de_CR < 0.0 || de_CR > 1.0) throw InvalidVariantParameters("CR must be in [0,1]");
    if (ga_crossover_prob < 0.0 || ga_crossover_prob > 1.0)
        throw InvalidVariantParameters("crossover probability must be in [0,1]");
    if (ga_mutation_prob > 1.0) throw InvalidVariantParameters("mutation probability must be in [0,1]");
    if (es_initial_step <= 0.0) throw InvalidVariantParameters("ES initial step must be positive");
}

Population initialize_population(const OptimizerConfig& config, const Bounds& bounds,
                                 const std::vector<SolutionVector>& seeds, RngStream& rng) {
    if (seeds.size() > static_cast<std::size_t>(config.population_size))
        throw SeedOutOfBounds("more seeds than population slots");
    Population pop;
    pop.members.reserve(config.population_size);
    for (const auto& s : seeds) {
        if (s.size() != bounds.dim()) throw DimensionMismatch("seed dimension mismatch");
        if (!bounds.contains(s)) throw SeedOutOfBounds("seed violates bounds");
        pop.members.push_back(s);
    }
    const std::size_t dim = bounds.dim();
    while (pop.members.size() < static_cast<std::size_t>(config.population_size)) {
        SolutionVector x(dim);
        for (std::size_t i = 0; i < dim; ++i) x[i] = rng.uniform(bounds.lower[i], bounds.upper[i]);
        pop.members.push_back(std::move(x));
    }
    return pop;
}

namespace {

int env_thread_cap() {
    const char* v = std::getenv("PHYSEVO_THREADS");
    if (!v) return 1;
    const int n = std::atoi(v);
    return n > 0 ? n : 1;
}

/// Budgeted, archive-appending batch evaluator. Evaluations are pure, so
/// batches may be split across threads; indices and archive order stay fixed.
class Evaluator {
  public:
    Evaluator(const Problem& problem, const OptimizerConfig& config, EvaluationArchive& archive, int run_id)
        : problem_(problem), config_(config), archive_(archive), run_id_(run_id), threads_(env_thread_cap()) {}

    std::uint64_t used() const { return next_index_; }
    std::uint64_t remaining() const { return config_.max_evaluations - next_index_; }

    /// Evaluates at most remaining() vectors from the front of the batch;
    /// returns the number actually evaluated.
    std::size_t evaluate(const std::vector<SolutionVector>& batch, std::vector<EvalResult>& out, int iteration) {
        const std::size_t n = std::min<std::size_t>(batch.size(), remaining());
        out.resize(n);
        std::vector<std::uint64_t> wall(n);
        auto work = [&](std::size_t begin, std::size_t end) {
            for (std::size_t i = begin; i < end; ++i) {
                const auto t0 = std::chrono::steady_clock::now();
                out[i] = problem_.evaluate(batch[i], config_.fidelity);
                const auto t1 = std::chrono::steady_clock::now();
                wall[i] = std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count();
            }
        };
        const std::size_t nthreads = std::min<std::size_t>(threads_, n > 0 ? n : 1);
        if (nthreads <= 1) {
            work(0, n);
        } else {
            std::vector<std::thread> pool;
            const std::size_t chunk = (n + nthreads - 1) / nthreads;
            for (std::size_t t = 0; t < nthreads; ++t)
                pool.emplace_back(work, std::min(t * chunk, n), std::min((t + 1) * chunk, n));
            for (auto& th : pool) th.join();
        }
        for (std::size_t i = 0; i < n; ++i) {
            out[i].eval_index = next_index_++;
            ArchiveRecord rec;
            rec.run = run_id_;
            rec.iteration = iteration;
            rec.eval_index = out[i].eval_index;
            rec.x = batch[i];
            rec.objective = out[i].objective;
            rec.hard_violations = out[i].hard_violations;
            rec.soft_penalties = out[i].soft_penalties;
            rec.fidelity = out[i].fidelity;
            rec.wall_ns = wall[i];
            archive_.append(std::move(rec));
        }
        return n;
    }

  private:
    const Problem& problem_;
    const OptimizerConfig& config_;
    EvaluationArchive& archive_;
    int run_id_;
    std::uint64_t next_index_ = 0;
    std::size_t threads_;
};

std::vector<SolutionVector> de_propose(const Population& pop, double F, double CR, RngStream& rng) {
    const std::size_t n = pop.members.size();
    const std::size_t dim = pop.members.front().size();
    std::vector<SolutionVector> trials(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t r1, r2, r3;
        do { r1 = rng.uniform_index(n); } while (r1 == i);
        do { r2 = rng.uniform_index(n); } while (r2 == i || r2 == r1);
        do { r3 = rng.uniform_index(n); } while (r3 == i || r3 == r1 || r3 == r2);
        SolutionVector trial = pop.members[i];
        const std::size_t jrand = rng.uniform_index(dim);
        for (std::size_t j = 0; j < dim; ++j) {
            if (rng.uniform01() < CR || j == jrand)
                trial[j] = pop.members[r1][j] + F * (pop.members[r2][j] - pop.members[r3][j]);
        }
        trials[i] = std::move(trial);
    }
    return trials;
}

struct PsoState {
    std::vector<SolutionVector> velocity;
    std::vector<SolutionVector> pbest_x;
    std::vector<EvalResult> pbest_f;
    SolutionVector gbest_x;
    EvalResult gbest_f;
};

struct EsState {
    SolutionVector mean;
    double sigma = 0.0;
    std::vector<double> path;  // cumulative step-size adaptation path
    std::vector<std::vector<double>> last_z;
    int lambda = 0;
    int mu = 0;
    std::vector<double> weights;
    double mu_eff = 0.0;
    double c_sigma = 0.0;
    double d_sigma = 0.0;
    double chi_n = 0.0;
};

EsState es_init(const SolutionVector& mean, const Bounds& bounds, const OptimizerConfig& cfg) {
    EsState s;
    s.mean = mean;
    double mean_width = 0.0;
    for (std::size_t i = 0; i < bounds.dim(); ++i) mean_width += bounds.upper[i] - bounds.lower[i];
    mean_width /= static_cast<double>(bounds.dim());
    s.sigma = cfg.es_initial_step * mean_width;
    s.path.assign(bounds.dim(), 0.0);
    s.lambda = cfg.es_lambda > 0 ? cfg.es_lambda : cfg.population_size;
    s.mu = cfg.es_mu > 0 ? cfg.es_mu : s.lambda / 2;
    if (s.mu < 1) s.mu = 1;
    s.weights.resize(s.mu);
    double wsum = 0.0;
    for (int i = 0; i < s.mu; ++i) {
        s.weights[i] = std::log(s.mu + 0.5) - std::log(i + 1.0);
        wsum += s.weights[i];
    }
    double w2 = 0.0;
    for (auto& w : s.weights) {
        w /= wsum;
        w2 += w * w;
    }
    s.mu_eff = 1.0 / w2;
    const double n = static_cast<double>(bounds.dim());
    s.c_sigma = (s.mu_eff + 2.0) / (n + s.mu_eff + 5.0);
    s.d_sigma = 1.0 + 2.0 * std::max(0.0, std::sqrt((s.mu_eff - 1.0) / (n + 1.0)) - 1.0) + s.c_sigma;
    s.chi_n = std::sqrt(n) * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));
    return s;
}

}  // namespace

RunResult run_optimizer(const Problem& problem, const OptimizerConfig& config,
                        const std::vector<SolutionVector>& seeds, RngStream rng,
                        EvaluationArchive& archive, int run_id) {
    config.validate(problem.dim());
    const Bounds bounds = problem.bounds();
    const std::size_t dim = problem.dim();
    const double R = config.penalty_coefficient;

    Evaluator evaluator(problem, config, archive, run_id);
    Population pop = initialize_population(config, bounds, seeds, rng);
    evaluator.evaluate(pop.members, pop.fitness, 0);
    pop.members.resize(pop.fitness.size());

    auto better = [R](const EvalResult& a, const EvalResult& b) { return prefers(a, b, R); };

    std::size_t best_idx = 0;
    for (std::size_t i = 1; i < pop.fitness.size(); ++i)
        if (better(pop.fitness[i], pop.fitness[best_idx])) best_idx = i;
    SolutionVector best_x = pop.members[best_idx];
    EvalResult best_f = pop.fitness[best_idx];

    RunResult result;
    result.termination = TerminationReason::BudgetExhausted;

    PsoState pso;
    EsState es;
    if (config.variant == Variant::PSO) {
        pso.velocity.assign(pop.members.size(), SolutionVector(dim, 0.0));
        pso.pbest_x = pop.members;
        pso.pbest_f = pop.fitness;
        pso.gbest_x = best_x;
        pso.gbest_f = best_f;
    } else if (config.variant == Variant::ES) {
        es = es_init(best_x, bounds, config);
    }

    auto record_trace = [&](int iteration) {
        IterationTrace t;
        t.iteration = iteration;
        t.best_objective = best_f.objective;
        double sum = 0.0;
        for (const auto& f : pop.fitness) sum += f.objective;
        t.mean_objective = pop.fitness.empty() ? 0.0 : sum / pop.fitness.size();
        double div = 0.0;
        for (std::size_t j = 0; j < dim; ++j) {
            double m = 0.0, m2 = 0.0;
            for (const auto& x : pop.members) m += x[j];
            m /= pop.members.size();
            for (const auto& x : pop.members) m2 += (x[j] - m) * (x[j] - m);
            div += std::sqrt(m2 / pop.members.size());
        }
        t.diversity = div / static_cast<double>(dim);
        result.trace.push_back(t);
    };
    record_trace(0);

    auto target_hit = [&]() {
        return config.target_objective && best_f.feasible() && best_f.objective <= *config.target_objective;
    };

    int stagnation = 0;
    double stagnation_ref = penalized_objective(best_f, R);
    int iteration = 0;

    while (evaluator.remaining() > 0 && !target_hit()) {
        ++iteration;
        std::vector<SolutionVector> proposals;
        switch (config.variant) {
            case Variant::DE:
                proposals = de_propose(pop, config.de_F, config.de_CR, rng);
                break;
            case Variant::PSO: {
                proposals.resize(pop.members.size());
                for (std::size_t i = 0; i < pop.members.size(); ++i) {
                    SolutionVector x = pop.members[i];
                    for (std::size_t j = 0; j < dim; ++j) {
                        const double vmax = 0.2 * (bounds.upper[j] - bounds.lower[j]);
                        double v = config.pso_w * pso.velocity[i][j] +
                                   config.pso_c1 * rng.uniform01() * (pso.pbest_x[i][j] - x[j]) +
                                   config.pso_c2 * rng.uniform01() * (pso.gbest_x[j] - x[j]);
                        v = std::clamp(v, -vmax, vmax);
                        pso.velocity[i][j] = v;
                        x[j] += v;
                    }
                    proposals[i] = std::move(x);
                }
                break;
            }
            case Variant::GA: {
                auto tournament = [&]() -> const SolutionVector& {
                    const std::size_t a = rng.uniform_index(pop.members.size());
                    const std::size_t b = rng.uniform_index(pop.members.size());
                    return better(pop.fitness[a], pop.fitness[b]) ? pop.members[a] : pop.members[b];
                };
                const double pm =
                    config.ga_mutation_prob >= 0.0 ? config.ga_mutation_prob : 1.0 / static_cast<double>(dim);
                while (proposals.size() < pop.members.size()) {
                    SolutionVector c1 = tournament();
                    SolutionVector c2 = tournament();
                    if (rng.uniform01() < config.ga_crossover_prob) {
                        for (std::size_t j = 0; j < dim; ++j) {
                            if (rng.uniform01() > 0.5) continue;
                            const double u = rng.uniform01();
                            const double eta = config.ga_sbx_eta;
                            const double beta = (u <= 0.5) ? std::pow(2.0 * u, 1.0 / (eta + 1.0))
                                                           : std::pow(1.0 / (2.0 * (1.0 - u)), 1.0 / (eta + 1.0));
                            const double a = c1[j], b = c2[j];
                            c1[j] = 0.5 * ((1.0 + beta) * a + (1.0 - beta) * b);
                            c2[j] = 0.5 * ((1.0 - beta) * a + (1.0 + beta) * b);
                        }
                    }
                    for (auto* child : {&c1, &c2}) {
                        for (std::size_t j = 0; j < dim; ++j) {
                            if (rng.uniform01() >= pm) continue;
                            const double u = rng.uniform01();
                            const double eta = config.ga_mutation_eta;
                            const double delta = (u < 0.5) ? std::pow(2.0 * u, 1.0 / (eta + 1.0)) - 1.0
                                                           : 1.0 - std::pow(2.0 * (1.0 - u), 1.0 / (eta + 1.0));
                            (*child)[j] += delta * (bounds.upper[j] - bounds.lower[j]);
                        }
                    }
                    proposals.push_back(std::move(c1));
                    if (proposals.size() < pop.members.size()) proposals.push_back(std::move(c2));
                }
                break;
            }
            case Variant::ES: {
                proposals.resize(es.lambda);
                es.last_z.assign(es.lambda, std::vector<double>(dim));
                for (int k = 0; k < es.lambda; ++k) {
                    SolutionVector x(dim);
                    for (std::size_t j = 0; j < dim; ++j) {
                        es.last_z[k][j] = rng.normal();
                        x[j] = es.mean[j] + es.sigma * es.last_z[k][j];
                    }
                    proposals[k] = std::move(x);
                }
                break;
            }
        }

        for (auto& p : proposals) p = repair_bounds(p, bounds, config.bounds_policy, rng);

        std::vector<EvalResult> results;
        const std::size_t evaluated = evaluator.evaluate(proposals, results, iteration);

        switch (config.variant) {
            case Variant::DE:
                for (std::size_t i = 0; i < evaluated; ++i)
                    if (better(results[i], pop.fitness[i])) {
                        pop.members[i] = proposals[i];
                        pop.fitness[i] = results[i];
                    }
                break;
            case Variant::PSO:
                for (std::size_t i = 0; i < evaluated; ++i) {
                    pop.members[i] = proposals[i];
                    pop.fitness[i] = results[i];
                    if (better(results[i], pso.pbest_f[i])) {
                        pso.pbest_x[i] = proposals[i];
                        pso.pbest_f[i] = results[i];
                    }
                    if (better(results[i], pso.gbest_f)) {
                        pso.gbest_x = proposals[i];
                        pso.gbest_f = results[i];
                    }
                }
                break;
            case Variant::GA: {
                if (evaluated == 0) break;
                // generational replacement with one elite slot
                std::size_t worst = 0, gen_best = 0;
                for (std::size_t i = 1; i < evaluated; ++i) {
                    if (better(results[worst], results[i])) worst = i;
                    if (better(results[i], results[gen_best])) gen_best = i;
                }
                std::vector<SolutionVector> next_m(proposals.begin(), proposals.begin() + evaluated);
                std::vector<EvalResult> next_f(results.begin(), results.begin() + evaluated);
                if (better(best_f, results[gen_best])) {
                    next_m[worst] = best_x;
                    next_f[worst] = best_f;
                }
                if (evaluated == pop.members.size()) {
                    pop.members = std::move(next_m);
                    pop.fitness = std::move(next_f);
                } else {
                    for (std::size_t i = 0; i < evaluated; ++i)
                        if (better(next_f[i], pop.fitness[i])) {
                            pop.members[i] = next_m[i];
                            pop.fitness[i] = next_f[i];
                        }
                }
                break;
            }
            case Variant::ES: {
                if (evaluated == 0) break;
                std::vector<std::size_t> order(evaluated);
                std::iota(order.begin(), order.end(), 0);
                std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                    return lexicographic_compare(results[a], results[b], R) < 0;
                });
                const int mu = std::min<int>(es.mu, static_cast<int>(evaluated));
                std::vector<double> new_mean(dim, 0.0), zw(dim, 0.0);
                double wnorm = 0.0;
                for (int i = 0; i < mu; ++i) wnorm += es.weights[i];
                for (int i = 0; i < mu; ++i) {
                    const double w = es.weights[i] / wnorm;
                    for (std::size_t j = 0; j < dim; ++j) {
                        new_mean[j] += w * proposals[order[i]][j];
                        zw[j] += w * es.last_z[order[i]][j];
                    }
                }
                es.mean = new_mean;
                double pnorm2 = 0.0;
                for (std::size_t j = 0; j < dim; ++j) {
                    es.path[j] = (1.0 - es.c_sigma) * es.path[j] +
                                 std::sqrt(es.c_sigma * (2.0 - es.c_sigma) * es.mu_eff) * zw[j];
                    pnorm2 += es.path[j] * es.path[j];
                }
                es.sigma *= std::exp(es.c_sigma / es.d_sigma * (std::sqrt(pnorm2) / es.chi_n - 1.0));
                // population bookkeeping mirrors the offspring for tracing
                pop.members.assign(proposals.begin(), proposals.begin() + evaluated);
                pop.fitness.assign(results.begin(), results.begin() + evaluated);
                break;
            }
        }

        for (std::size_t i = 0; i < evaluated; ++i)
            if (better(results[i], best_f)) {
                best_f = results[i];
                best_x = proposals[i];
            }

        pop.iteration = iteration;
        record_trace(iteration);

        const double current = penalized_objective(best_f, R);
        if (stagnation_ref - current > config.stagnation_improvement) {
            stagnation = 0;
            stagnation_ref = current;
        } else {
            ++stagnation;
        }
        if (target_hit()) {
            result.termination = TerminationReason::TargetReached;
            break;
        }
        if (config.stagnation_window > 0 && stagnation >= config.stagnation_window) {
            result.termination = TerminationReason::Stagnation;
            break;
        }
    }
    if (target_hit()) result.termination = TerminationReason::TargetReached;

    result.best_vector = std::move(best_x);
    result.best_result = best_f;
    result.evaluations_used = evaluator.used();
    return result;
}

}  // namespace physevo
