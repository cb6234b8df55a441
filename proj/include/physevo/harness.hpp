#pragma once

#include <memory>
#include <string>
#include <vector>

#include "physevo/algorithms.hpp"
#include "physevo/config.hpp"
#include "physevo/explain.hpp"
#include "physevo/problem.hpp"

namespace physevo::harness {

/// Problem factory over the config-visible problem ids. Data-backed problems
/// synthesize their datasets deterministically from the options.
std::unique_ptr<Problem> make_problem(const config::RunSpec& spec);

std::vector<std::string> list_problems();

struct RunOutcome {
    int run_id = 0;
    bool failed = false;
    std::string error;
    RunResult result;
    std::uint64_t wall_ms = 0;
};

struct ExecutionReport {
    std::string directory;
    std::vector<RunOutcome> outcomes;
};

/// Execute `repetitions` runs with seeds base_seed + run index. Writes, into
/// the run directory: the expanded config, one archive JSONL per run
/// (wall-clock-free), a timing sidecar per run, and summary.json. A marker
/// file flags in-progress directories; re-running over one requires force.
ExecutionReport execute_run(const config::RunSpec& spec, bool force = false);

/// Report kinds: stn, coverage, robustness, contribution, stats, convergence.
void export_reports(const std::string& run_dir, const std::vector<std::string>& kinds);

/// Paired statistics between two completed run directories (best objective
/// per repetition, matched by run index).
explain::RunStatistics compare_runs(const std::string& dir_a, const std::string& dir_b,
                                    int bootstrap_n = 2000, std::uint64_t seed = 1);

std::vector<double> best_objectives(const std::string& run_dir);

void write_convergence_svg(const std::vector<EvaluationArchive>& archives, const std::string& path);

}  // namespace physevo::harness
