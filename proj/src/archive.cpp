#include "physevo/archive.hpp"

#include <fstream>

#include "json.hpp"
#include "physevo/errors.hpp"

namespace physevo {

using nlohmann::json;

void EvaluationArchive::write_jsonl(const std::string& path, bool include_wall) const {
    std::ofstream out(path);
    if (!out) throw Error("cannot open archive for writing: " + path);
    for (const auto& r : records_) {
        json j;
        j["run"] = r.run;
        j["iter"] = r.iteration;
        j["eval"] = r.eval_index;
        j["x"] = r.x;
        j["obj"] = r.objective;
        j["hard"] = r.hard_violations;
        j["soft"] = r.soft_penalties;
        j["fid"] = r.fidelity;
        if (include_wall) j["wall_ns"] = r.wall_ns;
        out << j.dump() << "\n";
    }
}

EvaluationArchive EvaluationArchive::read_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MissingArchive("cannot open archive: " + path);
    EvaluationArchive a;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line);
        ArchiveRecord r;
        r.run = j.at("run").get<int>();
        r.iteration = j.at("iter").get<int>();
        r.eval_index = j.at("eval").get<std::uint64_t>();
        r.x = j.at("x").get<SolutionVector>();
        r.objective = j.at("obj").get<double>();
        r.hard_violations = j.at("hard").get<std::vector<double>>();
        r.soft_penalties = j.at("soft").get<std::vector<double>>();
        r.fidelity = j.at("fid").get<int>();
        r.wall_ns = j.contains("wall_ns") ? j.at("wall_ns").get<std::uint64_t>() : 0;
        a.append(std::move(r));
    }
    return a;
}

}  // namespace physevo
