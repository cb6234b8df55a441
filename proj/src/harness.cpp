#include "physevo/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "physevo/constraints.hpp"
#include "physevo/eit.hpp"
#include "physevo/errors.hpp"
#include "physevo/fpp.hpp"
#include "physevo/pet.hpp"
#include "physevo/scara.hpp"
#include "physevo/shape.hpp"

namespace physevo::harness {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kMarkerFile = ".incomplete";

double opt(const config::RunSpec& spec, const std::string& key) {
    return spec.problem_options.at(key);
}

int opt_i(const config::RunSpec& spec, const std::string& key) {
    return static_cast<int>(opt(spec, key));
}

std::string termination_to_string(TerminationReason t) {
    switch (t) {
        case TerminationReason::BudgetExhausted: return "budget";
        case TerminationReason::TargetReached: return "target";
        case TerminationReason::Stagnation: return "stagnation";
    }
    return "?";
}

std::string archive_path(const std::string& dir, int run) {
    return dir + "/run_" + std::to_string(run) + ".jsonl";
}

}  // namespace

std::vector<std::string> list_problems() {
    std::vector<std::string> out;
    for (const auto& [id, options] : config::problem_option_defaults()) out.push_back(id);
    return out;
}

std::unique_ptr<Problem> make_problem(const config::RunSpec& spec) {
    const std::string& id = spec.problem_id;
    if (id == "sphere")
        return std::make_unique<SphereProblem>(static_cast<std::size_t>(opt_i(spec, "dim")),
                                               opt(spec, "half_width"));
    if (id == "rosenbrock")
        return std::make_unique<RosenbrockProblem>(static_cast<std::size_t>(opt_i(spec, "dim")));
    if (id == "rastrigin")
        return std::make_unique<RastriginProblem>(static_cast<std::size_t>(opt_i(spec, "dim")));
    if (id == "scara") {
        const double tf = 2.0;
        scara::PhysParams phys = scara::default_phys_params(tf);
        const scara::FrictionParams friction{0.3, 0.1, 0.05};
        std::vector<double> times;
        for (int i = 1; i <= 50; ++i) times.push_back(tf * static_cast<double>(i) / 50.0);
        RngStream rng(static_cast<std::uint64_t>(opt(spec, "data_seed")), 0);
        scara::MeasuredData data = scara::synthesize_measurements(
            phys, friction, std::vector<double>(scara::kStateDim, 0.0), times,
            opt(spec, "noise_sd"), rng);
        return std::make_unique<scara::ScaraProblem>(std::move(phys), std::move(data),
                                                     opt_i(spec, "hidden_units"),
                                                     opt_i(spec, "steps_per_interval"));
    }
    if (id == "pet") {
        pet::FrameSchedule schedule = pet::default_schedule();
        pet::InputFunction input = pet::gamma_variate_input(100.0, 1.5, schedule.frames.back().second);
        const pet::Microparams truth{opt(spec, "true_k1"), opt(spec, "true_k2"),
                                     opt(spec, "true_k3"), 0.0, opt(spec, "true_vb")};
        pet::ObjectiveOptions opts;
        opts.exponent_regularization = opt(spec, "regularization_weight") > 0.0;
        opts.regularization_weight = opt(spec, "regularization_weight");
        pet::VoxelTac measured;
        const double sigma0 = opt(spec, "sigma0");
        if (sigma0 > 0.0) {
            RngStream rng(static_cast<std::uint64_t>(opt(spec, "data_seed")), 0);
            measured = pet::synthesize_frames(truth, input, schedule, sigma0, rng);
        } else {
            measured = pet::model_tac(truth, input, schedule);
        }
        return std::make_unique<pet::PetProblem>(std::move(input), std::move(schedule),
                                                 std::move(measured), opts);
    }
    if (id == "eit") {
        const int L = opt_i(spec, "electrode_count");
        // Measurements come from a finer mesh than the reconstruction uses.
        fem::Mesh data_mesh = fem::build_disk_mesh(opt_i(spec, "data_rings"),
                                                   opt_i(spec, "data_sectors"), 1.0);
        const eit::ElectrodeLayout data_layout = eit::make_layout(data_mesh, L, 1.0);
        const eit::MeasurementSchedule data_schedule =
            eit::measurement_schedule(data_layout, eit::Strategy::Adjacent);
        const std::vector<eit::Inclusion> inclusions{{opt(spec, "inclusion_x"),
                                                      opt(spec, "inclusion_y"),
                                                      opt(spec, "inclusion_r"),
                                                      opt(spec, "inclusion_value")}};
        const std::vector<double> sigma_true =
            eit::phantom_sigma(data_mesh, opt(spec, "background"), inclusions);
        std::vector<double> measured =
            eit::forward_voltages(data_mesh, data_layout, data_schedule, sigma_true);
        if (opt(spec, "noise_sd") > 0.0) {
            RngStream rng(42, 0);
            for (double& v : measured) v += opt(spec, "noise_sd") * rng.normal();
        }

        fem::Mesh mesh = fem::build_disk_mesh(opt_i(spec, "rings"), opt_i(spec, "sectors"), 1.0);
        eit::ElectrodeLayout layout = eit::make_layout(mesh, L, 1.0);
        eit::MeasurementSchedule schedule =
            eit::measurement_schedule(layout, eit::Strategy::Adjacent);
        eit::InverseGrid inverse{opt_i(spec, "grid_radial"), opt_i(spec, "grid_angular"), 1.0};
        return std::make_unique<eit::EitProblem>(std::move(mesh), std::move(layout),
                                                 std::move(schedule), inverse, std::move(measured),
                                                 -1.3, 0.3, opt(spec, "tikhonov_weight"),
                                                 opt(spec, "background"));
    }
    if (id == "fpp") {
        fpp::FppConfig cfg;
        cfg.patch_count = opt_i(spec, "patch_count");
        cfg.mesh_nx = opt_i(spec, "mesh_nx");
        cfg.mesh_ny = opt_i(spec, "mesh_ny");
        cfg.traction = opt(spec, "traction");
        cfg.thickness_jump_weight = opt(spec, "thickness_jump_weight");
        return std::make_unique<fpp::FppProblem>(cfg);
    }
    if (id == "shape") {
        shape::ShapeProblemConfig cfg;
        cfg.a_min = opt(spec, "a_min");
        cfg.boundary_samples = opt_i(spec, "boundary_samples");
        cfg.traction_x = opt(spec, "traction_x");
        cfg.traction_y = opt(spec, "traction_y");
        return std::make_unique<shape::ShapeProblem>(cfg);
    }
    throw ConfigError("unknown problem id: " + id);
}

ExecutionReport execute_run(const config::RunSpec& spec, bool force) {
    const fs::path dir(spec.output_dir);
    if (fs::exists(dir / kMarkerFile) && !force)
        throw ConfigError("run directory " + spec.output_dir +
                          " holds an incomplete run; pass --force to overwrite");
    fs::create_directories(dir);
    { std::ofstream marker(dir / kMarkerFile); marker << "running\n"; }

    {
        std::ofstream cfg(dir / "config.toml");
        cfg << config::serialize_config(spec);
    }

    const std::unique_ptr<Problem> problem = make_problem(spec);
    std::vector<SolutionVector> seeds = spec.inline_seeds;
    if (spec.use_problem_seeds)
        for (auto& s : problem->seeds()) seeds.push_back(std::move(s));

    ExecutionReport report;
    report.directory = spec.output_dir;
    json summary;
    summary["problem"] = spec.problem_id;
    summary["repetitions"] = spec.repetitions;
    summary["runs"] = json::array();

    for (int r = 0; r < spec.repetitions; ++r) {
        RunOutcome outcome;
        outcome.run_id = r;
        const std::uint64_t run_seed = spec.base_seed + static_cast<std::uint64_t>(r);
        json jr;
        jr["run"] = r;
        jr["seed"] = run_seed;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            EvaluationArchive archive;
            outcome.result = run_optimizer(*problem, spec.optimizer, seeds, RngStream(run_seed, 0),
                                           archive, r);
            archive.write_jsonl(archive_path(spec.output_dir, r), /*include_wall=*/false);
            {
                // Wall clocks live in a sidecar so archives stay reproducible.
                std::ofstream timing(dir / ("timing_" + std::to_string(r) + ".jsonl"));
                for (const auto& rec : archive.records())
                    timing << "{\"eval\":" << rec.eval_index << ",\"wall_ns\":" << rec.wall_ns
                           << "}\n";
            }
            jr["best_x"] = outcome.result.best_vector;
            jr["best_objective"] = outcome.result.best_result.objective;
            jr["hard_violations"] = outcome.result.best_result.hard_violations;
            jr["soft_penalties"] = outcome.result.best_result.soft_penalties;
            jr["termination"] = termination_to_string(outcome.result.termination);
            jr["evaluations"] = outcome.result.evaluations_used;
        } catch (const std::exception& e) {
            outcome.failed = true;
            outcome.error = e.what();
            jr["error"] = outcome.error;
        }
        const auto t1 = std::chrono::steady_clock::now();
        outcome.wall_ms = static_cast<std::uint64_t>(
            std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count());
        jr["wall_ms"] = outcome.wall_ms;
        summary["runs"].push_back(std::move(jr));
        report.outcomes.push_back(std::move(outcome));
    }

    {
        std::ofstream out(dir / "summary.json");
        out << summary.dump(2) << '\n';
    }
    fs::remove(dir / kMarkerFile);
    return report;
}

std::vector<double> best_objectives(const std::string& run_dir) {
    const fs::path p = fs::path(run_dir) / "summary.json";
    std::ifstream in(p);
    if (!in) throw MissingArchive("no summary.json in " + run_dir);
    json summary = json::parse(in);
    std::vector<double> out;
    for (const auto& jr : summary.at("runs"))
        if (!jr.contains("error")) out.push_back(jr.at("best_objective").get<double>());
    return out;
}

void write_convergence_svg(const std::vector<EvaluationArchive>& archives, const std::string& path) {
    // Best-so-far penalized objective per evaluation, one polyline per run.
    std::vector<std::vector<std::pair<double, double>>> series;
    double xmax = 1.0;
    double ymin = std::numeric_limits<double>::infinity();
    double ymax = -std::numeric_limits<double>::infinity();
    for (const auto& arch : archives) {
        std::vector<std::pair<double, double>> s;
        double best = std::numeric_limits<double>::infinity();
        std::size_t i = 0;
        const std::size_t stride = std::max<std::size_t>(1, arch.size() / 512);
        for (const auto& rec : arch.records()) {
            EvalResult er{rec.objective, rec.hard_violations, rec.soft_penalties, 0, rec.eval_index};
            best = std::min(best, penalized_objective(er, 1e3));
            if (i % stride == 0 || i + 1 == arch.size()) {
                s.emplace_back(static_cast<double>(i), best);
                ymin = std::min(ymin, best);
                ymax = std::max(ymax, best);
            }
            ++i;
        }
        xmax = std::max(xmax, static_cast<double>(arch.size()));
        series.push_back(std::move(s));
    }
    if (!std::isfinite(ymin)) { ymin = 0.0; ymax = 1.0; }
    if (ymax <= ymin) ymax = ymin + 1.0;

    const double W = 800, H = 500, ml = 80, mr = 20, mt = 20, mb = 50;
    auto X = [&](double v) { return ml + (W - ml - mr) * v / xmax; };
    auto Y = [&](double v) { return H - mb - (H - mb - mt) * (v - ymin) / (ymax - ymin); };
    static const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                   "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

    std::ofstream out(path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr << "\" y2=\""
        << H - mb << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << H - mb
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << (W / 2) << "\" y=\"" << (H - 10)
        << "\" text-anchor=\"middle\">evaluations</text>\n";
    out << "<text x=\"15\" y=\"" << (H / 2)
        << "\" text-anchor=\"middle\" transform=\"rotate(-90 15 " << (H / 2)
        << ")\">best objective</text>\n";
    out << "<text x=\"" << ml << "\" y=\"" << (H - mb + 20) << "\">0</text>\n";
    out << "<text x=\"" << (W - mr) << "\" y=\"" << (H - mb + 20)
        << "\" text-anchor=\"end\">" << static_cast<long long>(xmax) << "</text>\n";
    out << "<text x=\"" << (ml - 5) << "\" y=\"" << Y(ymin)
        << "\" text-anchor=\"end\">" << ymin << "</text>\n";
    out << "<text x=\"" << (ml - 5) << "\" y=\"" << (Y(ymax) + 10)
        << "\" text-anchor=\"end\">" << ymax << "</text>\n";
    for (std::size_t r = 0; r < series.size(); ++r) {
        out << "<polyline fill=\"none\" stroke=\"" << colors[r % 8] << "\" points=\"";
        for (const auto& [x, y] : series[r]) out << X(x) << ',' << Y(y) << ' ';
        out << "\"/>\n";
    }
    out << "</svg>\n";
}

void export_reports(const std::string& run_dir, const std::vector<std::string>& kinds) {
    const fs::path dir(run_dir);
    if (!fs::exists(dir / "config.toml"))
        throw MissingArchive("no config.toml in " + run_dir);
    const config::RunSpec spec = config::load_config((dir / "config.toml").string());
    const std::unique_ptr<Problem> problem = make_problem(spec);
    const Bounds bounds = problem->bounds();

    std::vector<EvaluationArchive> archives;
    for (int r = 0; r < spec.repetitions; ++r) {
        const std::string p = archive_path(run_dir, r);
        if (!fs::exists(p)) throw MissingArchive("no archive " + p);
        archives.push_back(EvaluationArchive::read_jsonl(p));
    }

    for (const std::string& kind : kinds) {
        if (kind == "stn") {
            const explain::StnGraph g = explain::build_stn(archives, bounds, 2);
            explain::write_stn_dot(g, (dir / "stn.dot").string());
            explain::write_stn_json(g, (dir / "stn.json").string());
        } else if (kind == "coverage") {
            for (std::size_t r = 0; r < archives.size(); ++r) {
                const explain::CoverageReport report = explain::coverage(archives[r], bounds, 10);
                explain::write_coverage_csv(
                    report, (dir / ("coverage_run" + std::to_string(r) + ".csv")).string());
            }
        } else if (kind == "robustness") {
            std::ifstream in(dir / "summary.json");
            if (!in) throw MissingArchive("no summary.json in " + run_dir);
            json summary = json::parse(in);
            const json* best_run = nullptr;
            for (const auto& jr : summary.at("runs")) {
                if (jr.contains("error")) continue;
                if (!best_run ||
                    jr.at("best_objective").get<double>() <
                        best_run->at("best_objective").get<double>())
                    best_run = &jr;
            }
            if (!best_run) throw MissingArchive("no successful runs in " + run_dir);
            const SolutionVector x = best_run->at("best_x").get<SolutionVector>();
            const double f = best_run->at("best_objective").get<double>();
            const double delta = std::max(1e-6, 0.01 * std::abs(f));
            const explain::RobustnessIntervals r = explain::robustness_intervals(*problem, x, delta);
            explain::write_robustness_csv(r, (dir / "robustness.csv").string());
        } else if (kind == "contribution") {
            EvaluationArchive merged;
            for (const auto& arch : archives)
                for (const auto& rec : arch.records()) merged.append(rec);
            const explain::ContributionRanking r = explain::contribution_ranking(merged, bounds);
            explain::write_contribution_csv(r, (dir / "contribution.csv").string());
        } else if (kind == "stats") {
            const std::vector<double> bests = best_objectives(run_dir);
            RngStream rng(7, 0);
            const explain::RunStatistics s = explain::multi_run_stats(bests, bests, 2000, rng);
            json j;
            j["best_objectives"] = bests;
            j["median"] = s.median_a;
            j["median_interval"] = {s.interval_a_low, s.interval_a_high};
            std::ofstream out(dir / "stats.json");
            out << j.dump(2) << '\n';
        } else if (kind == "convergence") {
            write_convergence_svg(archives, (dir / "convergence.svg").string());
        } else {
            throw ConfigError("unknown report kind: " + kind);
        }
    }
}

explain::RunStatistics compare_runs(const std::string& dir_a, const std::string& dir_b,
                                    int bootstrap_n, std::uint64_t seed) {
    RngStream rng(seed, 0);
    return explain::multi_run_stats(best_objectives(dir_a), best_objectives(dir_b), bootstrap_n, rng);
}

}  // namespace physevo::harness
