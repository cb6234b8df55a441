#include "physevo/explain.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include <Eigen/Dense>
#include "json.hpp"

#include "physevo/constraints.hpp"
#include "physevo/errors.hpp"

namespace physevo::explain {

namespace {

double normalize(double v, double lo, double hi) {
    return hi > lo ? (v - lo) / (hi - lo) : 0.0;
}

std::string cell_key(const SolutionVector& x, const Bounds& bounds, int precision) {
    std::string key;
    char buf[48];
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double n = normalize(x[i], bounds.lower[i], bounds.upper[i]);
        std::snprintf(buf, sizeof(buf), "%.*f", precision, n);
        if (i) key += '|';
        key += buf;
    }
    return key;
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double percentile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    if (v.size() == 1) return v.front();
    const double pos = q * static_cast<double>(v.size() - 1);
    const std::size_t i = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(i);
    if (i + 1 >= v.size()) return v.back();
    return v[i] * (1.0 - frac) + v[i + 1] * frac;
}

}  // namespace

StnGraph build_stn(const std::vector<EvaluationArchive>& archives, const Bounds& bounds,
                   int precision) {
    StnGraph g;
    for (const auto& arch : archives)
        if (!arch.empty() && arch.genotype_dim() != bounds.lower.size())
            throw DimensionMismatch("stn: archive genotype dim does not match bounds");

    for (const auto& arch : archives) {
        if (arch.empty()) continue;
        const int run = arch.records().front().run;

        // Best record of each iteration, by the feasibility-rules ordering.
        std::vector<const ArchiveRecord*> bests;
        const ArchiveRecord* current = nullptr;
        int current_iter = -1;
        auto better = [](const ArchiveRecord* a, const ArchiveRecord* b) {
            EvalResult ra{a->objective, a->hard_violations, a->soft_penalties, 0, a->eval_index};
            EvalResult rb{b->objective, b->hard_violations, b->soft_penalties, 0, b->eval_index};
            return lexicographic_compare(ra, rb, 1e3) < 0;
        };
        for (const auto& rec : arch.records()) {
            if (rec.iteration != current_iter) {
                if (current) bests.push_back(current);
                current = &rec;
                current_iter = rec.iteration;
            } else if (better(&rec, current)) {
                current = &rec;
            }
        }
        if (current) bests.push_back(current);

        std::string prev_key;
        for (std::size_t i = 0; i < bests.size(); ++i) {
            const std::string key = cell_key(bests[i]->x, bounds, precision);
            auto [it, inserted] = g.nodes.try_emplace(key);
            StnNode& node = it->second;
            if (inserted) {
                node.key = key;
                node.representative = bests[i]->x;
                node.best_objective = bests[i]->objective;
            }
            node.best_objective = std::min(node.best_objective, bests[i]->objective);
            node.visits += 1;
            node.runs.insert(run);
            if (i == 0) node.is_start = true;
            if (i + 1 == bests.size()) node.is_end = true;

            if (!prev_key.empty() && prev_key != key) {
                auto [eit, einserted] = g.edges.try_emplace({prev_key, key});
                if (einserted) {
                    eit->second.from = prev_key;
                    eit->second.to = key;
                }
                eit->second.traversals += 1;
                eit->second.runs.insert(run);
            }
            prev_key = key;
        }
    }
    return g;
}

void write_stn_dot(const StnGraph& g, const std::string& path) {
    std::ofstream out(path);
    out << "digraph stn {\n  node [shape=circle];\n";
    for (const auto& [key, node] : g.nodes) {
        out << "  \"" << key << "\" [label=\"" << node.best_objective << "\\nvisits " << node.visits
            << "\"";
        if (node.is_start) out << ", color=green";
        else if (node.is_end) out << ", color=red";
        if (node.runs.size() > 1) out << ", style=bold";
        out << "];\n";
    }
    for (const auto& [key, edge] : g.edges)
        out << "  \"" << edge.from << "\" -> \"" << edge.to << "\" [label=\"" << edge.traversals
            << "\"];\n";
    out << "}\n";
}

void write_stn_json(const StnGraph& g, const std::string& path) {
    nlohmann::json j;
    j["nodes"] = nlohmann::json::array();
    for (const auto& [key, node] : g.nodes) {
        j["nodes"].push_back({{"key", node.key},
                              {"representative", node.representative},
                              {"best_objective", node.best_objective},
                              {"visits", node.visits},
                              {"runs", std::vector<int>(node.runs.begin(), node.runs.end())},
                              {"start", node.is_start},
                              {"end", node.is_end}});
    }
    j["edges"] = nlohmann::json::array();
    for (const auto& [key, edge] : g.edges) {
        j["edges"].push_back({{"from", edge.from},
                              {"to", edge.to},
                              {"traversals", edge.traversals},
                              {"runs", std::vector<int>(edge.runs.begin(), edge.runs.end())}});
    }
    std::ofstream out(path);
    out << j.dump(2) << '\n';
}

CoverageReport coverage(const EvaluationArchive& archive, const Bounds& bounds, int grid_per_dim) {
    if (grid_per_dim < 1) throw InvalidParams("coverage: grid_per_dim must be >= 1");
    CoverageReport report;
    report.grid_per_dim = grid_per_dim;
    report.dim = bounds.lower.size();
    report.total_cells = std::pow(static_cast<double>(grid_per_dim), static_cast<double>(report.dim));

    std::set<std::string> occupied;
    report.cumulative.reserve(archive.size());
    for (const auto& rec : archive.records()) {
        if (rec.x.size() != report.dim)
            throw DimensionMismatch("coverage: record dim does not match bounds");
        std::string key;
        char buf[24];
        for (std::size_t i = 0; i < rec.x.size(); ++i) {
            const double n = normalize(rec.x[i], bounds.lower[i], bounds.upper[i]);
            int cell = static_cast<int>(n * grid_per_dim);
            cell = std::clamp(cell, 0, grid_per_dim - 1);
            std::snprintf(buf, sizeof(buf), "%d", cell);
            if (i) key += '|';
            key += buf;
        }
        occupied.insert(key);
        report.cumulative.push_back(static_cast<double>(occupied.size()) / report.total_cells);
    }
    report.occupied_cells = occupied.size();
    report.fraction = report.cumulative.empty() ? 0.0 : report.cumulative.back();
    return report;
}

void write_coverage_csv(const CoverageReport& report, const std::string& path) {
    std::ofstream out(path);
    out << "# grid_per_dim=" << report.grid_per_dim << " dim=" << report.dim
        << " occupied=" << report.occupied_cells << " fraction=" << report.fraction << '\n';
    out << "eval,cumulative_fraction\n";
    for (std::size_t i = 0; i < report.cumulative.size(); ++i)
        out << i << ',' << report.cumulative[i] << '\n';
}

RobustnessIntervals robustness_intervals(const Problem& problem, const SolutionVector& x_star,
                                         double delta, int scan, int fidelity) {
    RobustnessIntervals out;
    out.x_star = x_star;
    out.delta = delta;
    const Bounds b = problem.bounds();
    const double f_star = problem.evaluate(x_star, fidelity).objective;
    const std::size_t n = x_star.size();
    out.low.resize(n);
    out.high.resize(n);

    for (std::size_t i = 0; i < n; ++i) {
        auto within = [&](double v) {
            SolutionVector x = x_star;
            x[i] = v;
            return std::abs(problem.evaluate(x, fidelity).objective - f_star) < delta;
        };
        // Bisect toward each bound for the last in-tolerance point.
        auto scan_side = [&](double bound) {
            if (within(bound)) return bound;
            double inside = x_star[i], outside = bound;
            for (int s = 0; s < scan; ++s) {
                const double mid = 0.5 * (inside + outside);
                (within(mid) ? inside : outside) = mid;
            }
            return inside;
        };
        out.high[i] = scan_side(b.upper[i]);
        out.low[i] = scan_side(b.lower[i]);
    }
    return out;
}

void write_robustness_csv(const RobustnessIntervals& r, const std::string& path) {
    std::ofstream out(path);
    out << "# one-at-a-time intervals; variable interactions not probed\n";
    out << "variable,x_star,low,high,delta\n";
    for (std::size_t i = 0; i < r.x_star.size(); ++i)
        out << i << ',' << r.x_star[i] << ',' << r.low[i] << ',' << r.high[i] << ',' << r.delta
            << '\n';
}

ContributionRanking contribution_ranking(const EvaluationArchive& archive, const Bounds& bounds) {
    const std::size_t dim = bounds.lower.size();
    const std::size_t rows = archive.size();
    if (rows < dim + 1)
        throw DegenerateArchive("contribution: need at least dim+1 archive rows, have " +
                                std::to_string(rows));

    Eigen::MatrixXd X(rows, dim + 1);
    Eigen::VectorXd y(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        const auto& rec = archive.records()[r];
        if (rec.x.size() != dim) throw DimensionMismatch("contribution: record dim mismatch");
        for (std::size_t c = 0; c < dim; ++c)
            X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                normalize(rec.x[c], bounds.lower[c], bounds.upper[c]);
        X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(dim)) = 1.0;
        y(static_cast<Eigen::Index>(r)) = rec.objective;
    }

    const Eigen::VectorXd beta = X.colPivHouseholderQr().solve(y);
    const Eigen::VectorXd residual = y - X * beta;
    const double ss_res = residual.squaredNorm();
    const double mean = y.mean();
    const double ss_tot = (y.array() - mean).matrix().squaredNorm();

    ContributionRanking out;
    out.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    std::vector<double> score(dim);
    for (std::size_t c = 0; c < dim; ++c) {
        const auto col = X.col(static_cast<Eigen::Index>(c));
        const double m = col.mean();
        const double sd = std::sqrt((col.array() - m).square().sum() / static_cast<double>(rows));
        score[c] = std::abs(beta(static_cast<Eigen::Index>(c))) * sd;
    }
    out.variables.resize(dim);
    std::iota(out.variables.begin(), out.variables.end(), 0);
    std::stable_sort(out.variables.begin(), out.variables.end(),
                     [&](int a, int b) { return score[static_cast<std::size_t>(a)] >
                                                score[static_cast<std::size_t>(b)]; });
    out.scores.reserve(dim);
    for (int v : out.variables) out.scores.push_back(score[static_cast<std::size_t>(v)]);
    return out;
}

void write_contribution_csv(const ContributionRanking& r, const std::string& path) {
    std::ofstream out(path);
    out << "# linear surrogate, r_squared=" << r.r_squared << '\n';
    out << "rank,variable,score\n";
    for (std::size_t i = 0; i < r.variables.size(); ++i)
        out << i << ',' << r.variables[i] << ',' << r.scores[i] << '\n';
}

RunStatistics multi_run_stats(const std::vector<double>& best_a, const std::vector<double>& best_b,
                              int bootstrap_n, RngStream& rng) {
    if (best_a.empty() || best_a.size() != best_b.size())
        throw UnpairedRuns("stats: result lists must be non-empty and seed-paired");

    RunStatistics out;
    out.median_a = median_of(best_a);
    out.median_b = median_of(best_b);

    auto bootstrap = [&](const std::vector<double>& v, double& lo, double& hi) {
        std::vector<double> medians(static_cast<std::size_t>(bootstrap_n));
        std::vector<double> sample(v.size());
        for (int b = 0; b < bootstrap_n; ++b) {
            for (std::size_t i = 0; i < v.size(); ++i) sample[i] = v[rng.uniform_index(v.size())];
            medians[static_cast<std::size_t>(b)] = median_of(sample);
        }
        lo = percentile(medians, 0.025);
        hi = percentile(medians, 0.975);
    };
    bootstrap(best_a, out.interval_a_low, out.interval_a_high);
    bootstrap(best_b, out.interval_b_low, out.interval_b_high);

    double wins = 0.0;
    for (std::size_t i = 0; i < best_a.size(); ++i) {
        if (best_a[i] < best_b[i]) wins += 1.0;
        else if (best_a[i] == best_b[i]) wins += 0.5;
    }
    out.win_probability_a = (wins + 1.0) / (static_cast<double>(best_a.size()) + 2.0);
    return out;
}

}  // namespace physevo::explain
