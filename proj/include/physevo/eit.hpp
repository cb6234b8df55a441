#pragma once

#include <string>
#include <vector>

#include "physevo/fem.hpp"
#include "physevo/problem.hpp"

namespace physevo::eit {

/// Point electrodes at equally spaced boundary nodes of a disk mesh.
struct ElectrodeLayout {
    int count = 16;            // L, even
    double current = 1.0;      // drive amplitude (A)
    std::vector<int> nodes;    // boundary node index per electrode
};

/// Electrodes require the mesh boundary count to be a multiple of L.
ElectrodeLayout make_layout(const fem::Mesh& mesh, int electrode_count, double current);

enum class Strategy { Adjacent, Cross, Opposite, Trigonometric };
Strategy strategy_from_string(const std::string& s);

struct MeasurementSchedule {
    Strategy strategy = Strategy::Adjacent;
    struct Entry {
        int drive_a, drive_b;
        int meas_a, meas_b;
    };
    std::vector<Entry> entries;

    std::size_t count() const { return entries.size(); }
};

/// Adjacent protocol: drive (e, e+1), measure every adjacent pair not
/// touching the driven electrodes; R = L(L-3). Other strategies raise
/// UnsupportedStrategy.
MeasurementSchedule measurement_schedule(const ElectrodeLayout& layout, Strategy strategy);

/// Forward map: for each drive pair inject +-i at the electrode nodes,
/// ground the last electrode node, solve, and read the scheduled potential
/// differences, concatenated in schedule order.
std::vector<double> forward_voltages(const fem::Mesh& mesh, const ElectrodeLayout& layout,
                                     const MeasurementSchedule& schedule,
                                     const std::vector<double>& sigma_per_element);

/// Squared misfit plus optional Tikhonov term lambda_r * ||sigma - sigma_ref||^2.
double misfit(const std::vector<double>& predicted, const std::vector<double>& measured,
              const std::vector<double>& sigma = {}, double tikhonov_weight = 0.0,
              double sigma_ref = 0.0);

struct Inclusion {
    double cx, cy, radius, value;
};

/// Paint a conductivity field on a mesh: element centroids inside an
/// inclusion take its value, else background.
std::vector<double> phantom_sigma(const fem::Mesh& mesh, double background,
                                  const std::vector<Inclusion>& inclusions);

/// Coarse polar parameterization of the conductivity (radial x angular
/// cells); the genotype is log10(sigma) per cell.
struct InverseGrid {
    int radial = 8;
    int angular = 8;
    double radius = 1.0;

    int cell_count() const { return radial * angular; }
    int cell_of(double x, double y) const;
};

/// Reconstruction problem: genotype log10(sigma) per inverse cell, objective
/// squared misfit of forward voltages against measured data.
class EitProblem final : public Problem {
  public:
    EitProblem(fem::Mesh forward_mesh, ElectrodeLayout layout, MeasurementSchedule schedule,
               InverseGrid inverse, std::vector<double> measured, double log_sigma_lo = -1.3,
               double log_sigma_hi = 0.3, double tikhonov_weight = 0.0, double sigma_ref = 0.3);

    std::string name() const override { return "eit"; }
    std::size_t dim() const override { return static_cast<std::size_t>(inverse_.cell_count()); }
    Bounds bounds() const override { return Bounds::uniform(dim(), lo_, hi_); }

    /// Map a genotype to per-forward-element conductivities.
    std::vector<double> sigma_field(const SolutionVector& x) const;

    const fem::Mesh& mesh() const { return mesh_; }
    const MeasurementSchedule& schedule() const { return schedule_; }
    const ElectrodeLayout& layout() const { return layout_; }
    const std::vector<double>& measured() const { return measured_; }

  protected:
    EvalResult evaluate_impl(const SolutionVector& x, int fidelity) const override;

  private:
    fem::Mesh mesh_;
    ElectrodeLayout layout_;
    MeasurementSchedule schedule_;
    InverseGrid inverse_;
    std::vector<double> measured_;
    double lo_, hi_;
    double tikhonov_weight_;
    double sigma_ref_;
    std::vector<int> element_cell_;  // forward element -> inverse cell
};

void write_measurement_csv(const std::vector<double>& voltages, const std::string& path);
std::vector<double> read_measurement_csv(const std::string& path);

}  // namespace physevo::eit
