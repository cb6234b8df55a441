#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "physevo/config.hpp"
#include "physevo/errors.hpp"
#include "physevo/harness.hpp"

namespace {

std::vector<std::string> split_kinds(const std::string& csv) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : csv) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"physevo: physics-problem evolutionary optimization harness"};
    app.require_subcommand(1);

    std::string config_path, out_dir, run_dir, kinds_csv = "convergence", dir_a, dir_b;
    bool force = false;

    CLI::App* run = app.add_subcommand("run", "execute a configured optimization run");
    run->add_option("config", config_path, "TOML run configuration")->required();
    run->add_option("--out", out_dir, "override the output directory");
    run->add_flag("--force", force, "overwrite an incomplete run directory");

    CLI::App* report = app.add_subcommand("report", "emit reports for a completed run directory");
    report->add_option("dir", run_dir, "run directory")->required();
    report->add_option("--kinds", kinds_csv,
                       "comma-separated: stn,coverage,robustness,contribution,stats,convergence");

    CLI::App* compare = app.add_subcommand("compare", "paired statistics for two run directories");
    compare->add_option("dir_a", dir_a, "first run directory")->required();
    compare->add_option("dir_b", dir_b, "second run directory")->required();

    app.add_subcommand("list-problems", "print the available problem ids");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            physevo::config::RunSpec spec;
            try {
                spec = physevo::config::load_config(config_path);
            } catch (const physevo::ConfigError& e) {
                std::cerr << "config error: " << e.what() << "\n";
                return 1;
            }
            if (!out_dir.empty()) spec.output_dir = out_dir;
            const auto result = physevo::harness::execute_run(spec, force);
            for (const auto& outcome : result.outcomes) {
                if (outcome.failed)
                    std::cout << "run " << outcome.run_id << ": FAILED (" << outcome.error << ")\n";
                else
                    std::cout << "run " << outcome.run_id << ": best "
                              << outcome.result.best_result.objective << " after "
                              << outcome.result.evaluations_used << " evaluations ("
                              << outcome.wall_ms << " ms)\n";
            }
            std::cout << "outputs in " << result.directory << "\n";
        } else if (report->parsed()) {
            physevo::harness::export_reports(run_dir, split_kinds(kinds_csv));
            std::cout << "reports written to " << run_dir << "\n";
        } else if (compare->parsed()) {
            const auto stats = physevo::harness::compare_runs(dir_a, dir_b);
            std::printf("median A: %.6g  [%.6g, %.6g]\n", stats.median_a, stats.interval_a_low,
                        stats.interval_a_high);
            std::printf("median B: %.6g  [%.6g, %.6g]\n", stats.median_b, stats.interval_b_low,
                        stats.interval_b_high);
            std::printf("P(A beats B) = %.4f\n", stats.win_probability_a);
        } else {  // list-problems
            for (const auto& id : physevo::harness::list_problems()) std::cout << id << "\n";
        }
    } catch (const physevo::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
