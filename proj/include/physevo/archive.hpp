#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "physevo/types.hpp"

namespace physevo {

/// One row per evaluation; the substrate for all explainability reports.
struct ArchiveRecord {
    int run = 0;
    int iteration = 0;
    std::uint64_t eval_index = 0;
    SolutionVector x;
    double objective = 0.0;
    std::vector<double> hard_violations;
    std::vector<double> soft_penalties;
    int fidelity = 0;
    std::uint64_t wall_ns = 0;
};

/// Append-only evaluation log for one run. Appends are expected in
/// eval_index order (the optimizer sorts before flushing when evaluating
/// concurrently).
class EvaluationArchive {
  public:
    void append(ArchiveRecord rec) { records_.push_back(std::move(rec)); }

    const std::vector<ArchiveRecord>& records() const { return records_; }
    std::size_t size() const { return records_.size(); }
    bool empty() const { return records_.empty(); }

    std::size_t genotype_dim() const { return records_.empty() ? 0 : records_.front().x.size(); }

    /// include_wall=false omits the wall-clock field, making the file a pure
    /// function of (spec, seed) for reproducibility hashing.
    void write_jsonl(const std::string& path, bool include_wall = true) const;
    static EvaluationArchive read_jsonl(const std::string& path);

  private:
    std::vector<ArchiveRecord> records_;
};

}  // namespace physevo
