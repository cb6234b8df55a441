#include "physevo/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "physevo/errors.hpp"

namespace physevo::config {

namespace {

struct Value {
    enum Kind { Bool, Number, String, Array } kind = Number;
    bool b = false;
    double num = 0.0;
    std::string str;
    std::vector<Value> arr;
};

struct Entry {
    std::string section;  // "" for top level
    std::string key;
    Value value;
    int line = 0;
    int col = 0;
};

std::size_t skip_ws(const std::string& s, std::size_t i) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    return i;
}

/// Parse one value starting at s[i]; advances i past the value.
Value parse_value(const std::string& s, std::size_t& i, int line) {
    i = skip_ws(s, i);
    if (i >= s.size()) throw ParseError("expected a value", line, static_cast<int>(i) + 1);
    Value v;
    const char c = s[i];
    if (c == '"') {
        v.kind = Value::String;
        ++i;
        while (i < s.size() && s[i] != '"') {
            if (s[i] == '\\' && i + 1 < s.size()) ++i;
            v.str += s[i++];
        }
        if (i >= s.size()) throw ParseError("unterminated string", line, static_cast<int>(i) + 1);
        ++i;  // closing quote
        return v;
    }
    if (c == '[') {
        v.kind = Value::Array;
        ++i;
        i = skip_ws(s, i);
        if (i < s.size() && s[i] == ']') {
            ++i;
            return v;
        }
        while (true) {
            v.arr.push_back(parse_value(s, i, line));
            i = skip_ws(s, i);
            if (i < s.size() && s[i] == ',') {
                ++i;
                continue;
            }
            if (i < s.size() && s[i] == ']') {
                ++i;
                return v;
            }
            throw ParseError("expected ',' or ']' in array", line, static_cast<int>(i) + 1);
        }
    }
    if (s.compare(i, 4, "true") == 0) {
        v.kind = Value::Bool;
        v.b = true;
        i += 4;
        return v;
    }
    if (s.compare(i, 5, "false") == 0) {
        v.kind = Value::Bool;
        v.b = false;
        i += 5;
        return v;
    }
    char* end = nullptr;
    v.num = std::strtod(s.c_str() + i, &end);
    if (end == s.c_str() + i)
        throw ParseError("cannot parse value", line, static_cast<int>(i) + 1);
    i = static_cast<std::size_t>(end - s.c_str());
    return v;
}

/// Strip a trailing comment that is not inside a string literal.
std::string strip_comment(const std::string& line) {
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) in_string = !in_string;
        else if (line[i] == '#' && !in_string) return line.substr(0, i);
    }
    return line;
}

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::vector<Entry> tokenize(const std::string& text) {
    std::vector<Entry> out;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(strip_comment(raw));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ParseError("unterminated section header", line_no, static_cast<int>(line.size()));
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) throw ParseError("empty section name", line_no, 1);
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) throw ParseError("expected 'key = value'", line_no, 1);
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw ParseError("empty key", line_no, 1);
        std::size_t i = eq + 1;
        Value v = parse_value(line, i, line_no);
        if (skip_ws(line, i) != line.size())
            throw ParseError("trailing characters after value", line_no, static_cast<int>(i) + 1);
        out.push_back({section, key, std::move(v), line_no, 1});
    }
    return out;
}

double require_number(const Entry& e) {
    if (e.value.kind != Value::Number)
        throw ParseError("key '" + e.key + "' expects a number", e.line, e.col);
    return e.value.num;
}

int require_int(const Entry& e) {
    const double v = require_number(e);
    if (v != std::floor(v)) throw ParseError("key '" + e.key + "' expects an integer", e.line, e.col);
    return static_cast<int>(v);
}

std::string require_string(const Entry& e) {
    if (e.value.kind != Value::String)
        throw ParseError("key '" + e.key + "' expects a string", e.line, e.col);
    return e.value.str;
}

bool require_bool(const Entry& e) {
    if (e.value.kind != Value::Bool)
        throw ParseError("key '" + e.key + "' expects a boolean", e.line, e.col);
    return e.value.b;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

const std::map<std::string, std::map<std::string, double>>& problem_option_defaults() {
    static const std::map<std::string, std::map<std::string, double>> defaults = {
        {"sphere", {{"dim", 10}, {"half_width", 5}}},
        {"rosenbrock", {{"dim", 10}}},
        {"rastrigin", {{"dim", 10}}},
        {"scara", {{"hidden_units", 8}, {"steps_per_interval", 10}, {"noise_sd", 0}, {"data_seed", 7}}},
        {"pet",
         {{"sigma0", 0},
          {"data_seed", 7},
          {"true_k1", 0.5},
          {"true_k2", 0.3},
          {"true_k3", 0.15},
          {"true_vb", 0.05},
          {"regularization_weight", 0}}},
        {"eit",
         {{"electrode_count", 16},
          {"rings", 8},
          {"sectors", 32},
          {"data_rings", 12},
          {"data_sectors", 48},
          {"grid_radial", 8},
          {"grid_angular", 8},
          {"background", 0.3},
          {"inclusion_x", 0.35},
          {"inclusion_y", 0.0},
          {"inclusion_r", 0.3},
          {"inclusion_value", 1.0},
          {"noise_sd", 0},
          {"tikhonov_weight", 0}}},
        {"fpp",
         {{"patch_count", 8},
          {"mesh_nx", 24},
          {"mesh_ny", 12},
          {"traction", 1e6},
          {"thickness_jump_weight", 1}}},
        {"shape",
         {{"a_min", 0.3},
          {"boundary_samples", 64},
          {"traction_x", 1e6},
          {"traction_y", 1e6}}},
    };
    return defaults;
}

std::string bounds_policy_to_string(BoundsPolicy p) {
    switch (p) {
        case BoundsPolicy::Clamp: return "clamp";
        case BoundsPolicy::Reflect: return "reflect";
        case BoundsPolicy::Resample: return "resample";
    }
    return "?";
}

BoundsPolicy bounds_policy_from_string(const std::string& s) {
    if (s == "clamp") return BoundsPolicy::Clamp;
    if (s == "reflect") return BoundsPolicy::Reflect;
    if (s == "resample") return BoundsPolicy::Resample;
    throw ConfigError("unknown bounds_policy: " + s);
}

RunSpec parse_config(const std::string& text) {
    const std::vector<Entry> entries = tokenize(text);

    RunSpec spec;
    bool have_problem = false;
    for (const Entry& e : entries) {
        if (e.section.empty() && e.key == "problem") {
            spec.problem_id = require_string(e);
            have_problem = true;
        }
    }
    if (!have_problem) throw MissingRequired("config: top-level key 'problem' is required");
    const auto defaults_it = problem_option_defaults().find(spec.problem_id);
    if (defaults_it == problem_option_defaults().end())
        throw ConfigError("config: unknown problem id '" + spec.problem_id + "'");
    spec.problem_options = defaults_it->second;

    for (const Entry& e : entries) {
        if (e.section.empty()) {
            if (e.key == "problem") continue;
            throw UnknownKey("config: unknown top-level key '" + e.key + "'");
        }
        if (e.section == "problem") {
            auto it = spec.problem_options.find(e.key);
            if (it == spec.problem_options.end())
                throw UnknownKey("config: unknown key '" + e.key + "' for problem '" +
                                 spec.problem_id + "'");
            it->second = require_number(e);
        } else if (e.section == "optimizer") {
            OptimizerConfig& oc = spec.optimizer;
            if (e.key == "variant") oc.variant = variant_from_string(require_string(e));
            else if (e.key == "population_size") oc.population_size = require_int(e);
            else if (e.key == "max_evaluations")
                oc.max_evaluations = static_cast<std::uint64_t>(require_number(e));
            else if (e.key == "target_objective") oc.target_objective = require_number(e);
            else if (e.key == "stagnation_window") oc.stagnation_window = require_int(e);
            else if (e.key == "stagnation_improvement") oc.stagnation_improvement = require_number(e);
            else if (e.key == "fidelity") oc.fidelity = require_int(e);
            else if (e.key == "de_f") oc.de_F = require_number(e);
            else if (e.key == "de_cr") oc.de_CR = require_number(e);
            else if (e.key == "pso_w") oc.pso_w = require_number(e);
            else if (e.key == "pso_c1") oc.pso_c1 = require_number(e);
            else if (e.key == "pso_c2") oc.pso_c2 = require_number(e);
            else if (e.key == "ga_crossover_prob") oc.ga_crossover_prob = require_number(e);
            else if (e.key == "ga_sbx_eta") oc.ga_sbx_eta = require_number(e);
            else if (e.key == "ga_mutation_prob") oc.ga_mutation_prob = require_number(e);
            else if (e.key == "ga_mutation_eta") oc.ga_mutation_eta = require_number(e);
            else if (e.key == "es_lambda") oc.es_lambda = require_int(e);
            else if (e.key == "es_mu") oc.es_mu = require_int(e);
            else if (e.key == "es_initial_step") oc.es_initial_step = require_number(e);
            else if (e.key == "bounds_policy")
                oc.bounds_policy = bounds_policy_from_string(require_string(e));
            else if (e.key == "penalty_coefficient") oc.penalty_coefficient = require_number(e);
            else throw UnknownKey("config: unknown key 'optimizer." + e.key + "'");
        } else if (e.section == "run") {
            if (e.key == "seed") spec.base_seed = static_cast<std::uint64_t>(require_number(e));
            else if (e.key == "repetitions") spec.repetitions = require_int(e);
            else if (e.key == "output_dir") spec.output_dir = require_string(e);
            else throw UnknownKey("config: unknown key 'run." + e.key + "'");
        } else if (e.section == "seeds") {
            if (e.key == "use_problem_seeds") spec.use_problem_seeds = require_bool(e);
            else if (e.key == "inline") {
                if (e.value.kind != Value::Array)
                    throw ParseError("seeds.inline expects an array of arrays", e.line, e.col);
                for (const Value& row : e.value.arr) {
                    if (row.kind != Value::Array)
                        throw ParseError("seeds.inline expects an array of arrays", e.line, e.col);
                    SolutionVector v;
                    for (const Value& cell : row.arr) {
                        if (cell.kind != Value::Number)
                            throw ParseError("seed entries must be numbers", e.line, e.col);
                        v.push_back(cell.num);
                    }
                    spec.inline_seeds.push_back(std::move(v));
                }
            } else
                throw UnknownKey("config: unknown key 'seeds." + e.key + "'");
        } else {
            throw UnknownKey("config: unknown section '[" + e.section + "]'");
        }
    }

    if (spec.repetitions < 1) throw ConfigError("config: repetitions must be >= 1");
    return spec;
}

RunSpec load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize_config(const RunSpec& spec) {
    std::ostringstream out;
    out << "problem = \"" << spec.problem_id << "\"\n\n";

    out << "[problem]\n";
    for (const auto& [key, value] : spec.problem_options)
        out << key << " = " << fmt(value) << '\n';

    const OptimizerConfig& oc = spec.optimizer;
    out << "\n[optimizer]\n";
    out << "variant = \"" << variant_to_string(oc.variant) << "\"\n";
    out << "population_size = " << oc.population_size << '\n';
    out << "max_evaluations = " << oc.max_evaluations << '\n';
    if (oc.target_objective) out << "target_objective = " << fmt(*oc.target_objective) << '\n';
    out << "stagnation_window = " << oc.stagnation_window << '\n';
    out << "stagnation_improvement = " << fmt(oc.stagnation_improvement) << '\n';
    out << "fidelity = " << oc.fidelity << '\n';
    out << "de_f = " << fmt(oc.de_F) << '\n';
    out << "de_cr = " << fmt(oc.de_CR) << '\n';
    out << "pso_w = " << fmt(oc.pso_w) << '\n';
    out << "pso_c1 = " << fmt(oc.pso_c1) << '\n';
    out << "pso_c2 = " << fmt(oc.pso_c2) << '\n';
    out << "ga_crossover_prob = " << fmt(oc.ga_crossover_prob) << '\n';
    out << "ga_sbx_eta = " << fmt(oc.ga_sbx_eta) << '\n';
    out << "ga_mutation_prob = " << fmt(oc.ga_mutation_prob) << '\n';
    out << "ga_mutation_eta = " << fmt(oc.ga_mutation_eta) << '\n';
    out << "es_lambda = " << oc.es_lambda << '\n';
    out << "es_mu = " << oc.es_mu << '\n';
    out << "es_initial_step = " << fmt(oc.es_initial_step) << '\n';
    out << "bounds_policy = \"" << bounds_policy_to_string(oc.bounds_policy) << "\"\n";
    out << "penalty_coefficient = " << fmt(oc.penalty_coefficient) << '\n';

    out << "\n[run]\n";
    out << "seed = " << spec.base_seed << '\n';
    out << "repetitions = " << spec.repetitions << '\n';
    out << "output_dir = \"" << spec.output_dir << "\"\n";

    out << "\n[seeds]\n";
    out << "use_problem_seeds = " << (spec.use_problem_seeds ? "true" : "false") << '\n';
    if (!spec.inline_seeds.empty()) {
        out << "inline = [";
        for (std::size_t i = 0; i < spec.inline_seeds.size(); ++i) {
            if (i) out << ", ";
            out << '[';
            for (std::size_t j = 0; j < spec.inline_seeds[i].size(); ++j) {
                if (j) out << ", ";
                out << fmt(spec.inline_seeds[i][j]);
            }
            out << ']';
        }
        out << "]\n";
    }
    return out.str();
}

}  // namespace physevo::config
