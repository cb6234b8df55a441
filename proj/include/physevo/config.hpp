#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "physevo/algorithms.hpp"
#include "physevo/types.hpp"

namespace physevo::config {

/// Fully expanded run description. Loading fills every default, so the
/// serialized echo is total: two specs behave identically iff they compare
/// equal.
struct RunSpec {
    std::string problem_id;
    std::map<std::string, double> problem_options;  // per-problem numeric knobs
    OptimizerConfig optimizer;
    std::uint64_t base_seed = 1;
    int repetitions = 1;
    std::string output_dir = "out";
    std::vector<SolutionVector> inline_seeds;
    bool use_problem_seeds = true;

    friend bool operator==(const RunSpec&, const RunSpec&) = default;
};

/// Problem ids accepted in configs, with their option keys and defaults.
const std::map<std::string, std::map<std::string, double>>& problem_option_defaults();

/// Parse config text (declarative TOML subset: [sections], key = value,
/// strings, numbers, booleans, arrays, # comments). Unknown sections or keys
/// raise UnknownKey; syntax errors raise ParseError with location.
RunSpec parse_config(const std::string& text);

RunSpec load_config(const std::string& path);

/// Echo of the expanded spec; parse_config(serialize_config(s)) == s.
std::string serialize_config(const RunSpec& spec);

std::string bounds_policy_to_string(BoundsPolicy p);
BoundsPolicy bounds_policy_from_string(const std::string& s);

}  // namespace physevo::config
