#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "physevo/archive.hpp"
#include "physevo/problem.hpp"
#include "physevo/rng.hpp"
#include "physevo/types.hpp"

namespace physevo::explain {

/// Search trajectory network: best-of-iteration solutions discretized to
/// cells; consecutive distinct cells within a run form directed edges.
struct StnNode {
    std::string key;               // rounded normalized coordinates
    SolutionVector representative; // first solution mapped to this cell
    double best_objective = 0.0;
    int visits = 0;
    std::set<int> runs;
    bool is_start = false;
    bool is_end = false;
};

struct StnEdge {
    std::string from;
    std::string to;
    int traversals = 0;
    std::set<int> runs;
};

struct StnGraph {
    std::map<std::string, StnNode> nodes;
    std::map<std::pair<std::string, std::string>, StnEdge> edges;
};

StnGraph build_stn(const std::vector<EvaluationArchive>& archives, const Bounds& bounds,
                   int precision);

void write_stn_dot(const StnGraph& g, const std::string& path);
void write_stn_json(const StnGraph& g, const std::string& path);

struct CoverageReport {
    int grid_per_dim = 0;
    std::size_t dim = 0;
    std::size_t occupied_cells = 0;
    double total_cells = 0.0;            // grid^dim (may exceed 2^64)
    double fraction = 0.0;
    std::vector<double> cumulative;      // fraction after each evaluation
};

/// Grid-cell occupancy of all evaluated points. Cells are held as a sparse
/// set of keys, so huge grid^dim products only affect the denominator.
CoverageReport coverage(const EvaluationArchive& archive, const Bounds& bounds, int grid_per_dim);

void write_coverage_csv(const CoverageReport& report, const std::string& path);

struct RobustnessIntervals {
    SolutionVector x_star;
    std::vector<double> low;
    std::vector<double> high;
    double delta = 0.0;
};

/// Largest per-coordinate range around x_star (others fixed) where the
/// objective moves by less than delta; bisection with `scan` refinement
/// steps per side, truncated at the bounds.
RobustnessIntervals robustness_intervals(const Problem& problem, const SolutionVector& x_star,
                                         double delta, int scan = 30, int fidelity = 0);

void write_robustness_csv(const RobustnessIntervals& r, const std::string& path);

struct ContributionRanking {
    std::vector<int> variables;   // variable indices, best first
    std::vector<double> scores;   // |coefficient| * coordinate std, same order
    double r_squared = 0.0;
};

/// Linear-surrogate variable importance over the whole archive.
ContributionRanking contribution_ranking(const EvaluationArchive& archive, const Bounds& bounds);

void write_contribution_csv(const ContributionRanking& r, const std::string& path);

struct RunStatistics {
    double median_a = 0.0, median_b = 0.0;
    double interval_a_low = 0.0, interval_a_high = 0.0;
    double interval_b_low = 0.0, interval_b_high = 0.0;
    double win_probability_a = 0.5;  // P(config A beats B), posterior mean
};

/// Bootstrap medians plus a Beta(1,1) posterior win probability over paired
/// runs; ties count half a win each.
RunStatistics multi_run_stats(const std::vector<double>& best_a, const std::vector<double>& best_b,
                              int bootstrap_n, RngStream& rng);

}  // namespace physevo::explain
