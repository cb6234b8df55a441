#pragma once

#include <string>
#include <vector>

#include "physevo/fem.hpp"
#include "physevo/problem.hpp"

namespace physevo::fpp {

/// One rectangular composite patch; the genotype carries (x, y, theta) per
/// patch, size/thickness/material are fixed configuration.
struct Patch {
    double x = 0.0, y = 0.0, theta = 0.0;  // center (m), orientation (rad)
    double thickness = 1e-3;               // m
    double width = 0.5, height = 0.25;     // m
    Eigen::Matrix3d stiffness;             // plane-stress Voigt, material frame
};

struct StrengthLimits {
    double Xt = 1.0e9;  // fiber tension (Pa)
    double Xc = 0.8e9;  // fiber compression
    double Yt = 5.0e7;  // transverse tension
    double Yc = 1.5e8;  // transverse compression
    double S = 7.0e7;   // in-plane shear
};

struct FppConfig {
    int patch_count = 8;
    double plate_width = 2.0, plate_height = 1.0;  // m
    int mesh_nx = 24, mesh_ny = 12;
    double traction = 1.0e6;  // N/m on the right edge, +x
    double patch_width = 0.5, patch_height = 0.25, patch_thickness = 1e-3;
    double E1 = 130e9, E2 = 10e9, nu12 = 0.3, G12 = 5e9;  // patch material
    double thickness_jump_weight = 1.0;
    StrengthLimits limits;
};

/// Per-element laminate state from Eq.-style thickness-weighted averaging.
struct StiffnessField {
    std::vector<Eigen::Matrix3d> stiffness;           // effective C(x), per element
    std::vector<double> thickness;                    // T(x), 0 where uncovered
    std::vector<std::vector<int>> covering_patches;   // patch indices per element
};

std::vector<Patch> decode_design(const SolutionVector& x, const FppConfig& cfg);

bool point_in_patch(const Patch& p, double px, double py);

/// Thickness-weighted stiffness per element centroid; uncovered elements get
/// a 1e-6-scaled isotropic floor so the system stays SPD.
StiffnessField stiffness_field(const std::vector<Patch>& patches, const fem::Mesh& mesh,
                               const FppConfig& cfg);

/// Plane-stress Hashin failure index: max over the fiber/matrix
/// tension/compression sub-criteria; >= 1 means failure. Stress is expected
/// in the patch material frame.
double hashin_index(double s11, double s22, double s12, const StrengthLimits& limits);

/// Fraction of a patch's area outside the plate, estimated on a 4x4 interior
/// sample grid.
double position_violation(const Patch& p, const FppConfig& cfg);

/// Thickness-jump soft penalty: sum over adjacent element pairs of
/// |T(a) - T(b)| times the shared edge length.
double thickness_jump_penalty(const StiffnessField& field, const fem::Mesh& mesh);

struct DesignEvaluation {
    EvalResult result;
    fem::FemSolution solution;
    StiffnessField field;
    double max_hashin = 0.0;
};

/// Compliance objective with hard violations [position exceedance, strength
/// exceedance] and the thickness-jump soft penalty.
class FppProblem final : public Problem {
  public:
    explicit FppProblem(FppConfig cfg);

    std::string name() const override { return "fpp"; }
    std::size_t dim() const override { return 3 * static_cast<std::size_t>(cfg_.patch_count); }
    Bounds bounds() const override;
    std::vector<SolutionVector> seeds() const override;

    const FppConfig& config() const { return cfg_; }
    const fem::Mesh& mesh() const { return mesh_; }

    DesignEvaluation evaluate_design(const SolutionVector& x) const;

    /// Principal-stress-aligned seed from the homogeneous isotropic plate.
    SolutionVector principal_stress_seed() const;

  protected:
    EvalResult evaluate_impl(const SolutionVector& x, int fidelity) const override;

  private:
    FppConfig cfg_;
    fem::Mesh mesh_;
    fem::ElasticBc bc_;
    std::vector<fem::ElementEdge> edges_;
};

void write_design_csv(const std::vector<Patch>& patches, const std::string& path);

}  // namespace physevo::fpp
