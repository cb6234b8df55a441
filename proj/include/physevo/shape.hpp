#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "physevo/fem.hpp"
#include "physevo/problem.hpp"

namespace physevo::shape {

/// Quarter-symmetric hole boundary: a two-segment quadratic Bezier through
/// (P1_1, 0) -> (P1_2, P2_2) -> (0, P2_3) with tangent angle psi2 at the
/// middle node, reflected into the remaining quadrants.
struct HoleSpline {
    double p11 = 0.4;          // x-axis endpoint radius
    double p12 = 0.2828427124746190;  // node-2 x
    double p22 = 0.2828427124746190;  // node-2 y
    double p23 = 0.4;          // y-axis endpoint radius
    double psi2 = 2.356194490192345;  // tangent angle at node 2 (3*pi/4)
};

struct ShapeProblemConfig {
    double lambda = 40.384615e9;  // Lamé lambda (Pa), 3D value
    double mu = 26.923077e9;      // Lamé mu (Pa)
    double half_width = 1.0;      // quarter-plate side (m)
    double traction_x = 1.0e6;    // outer-edge tractions (N/m)
    double traction_y = 1.0e6;
    double a_min = 0.3;           // minimum enclosed hole area (m^2)
    std::vector<std::pair<int, int>> fidelity_grids = {{32, 32}, {96, 96}};
    int boundary_samples = 64;    // polyline samples per quadrant
};

HoleSpline decode_spline(const SolutionVector& x);
SolutionVector encode_spline(const HoleSpline& s);

/// Graded validity violation: 0 when the spline is usable; otherwise the sum
/// of bound exceedances (radii and node 2 within the quadrant box, psi2 in
/// (pi/2, pi)) plus the count of self-intersections of the sampled curve.
double validity(const HoleSpline& s, const ShapeProblemConfig& cfg);

/// First-quadrant polyline with `samples` points, from the x-axis endpoint to
/// the y-axis endpoint.
std::vector<std::array<double, 2>> hole_boundary(const HoleSpline& s, int samples);

/// Full closed curve from quarter-symmetry reflection (counterclockwise).
std::vector<std::array<double, 2>> closed_boundary(const HoleSpline& s, int samples_per_quadrant);

/// Shoelace area of a closed polyline; throws SelfIntersecting when
/// non-adjacent segments cross.
double enclosed_area(const std::vector<std::array<double, 2>>& closed_polyline);

struct ShapeEvaluation {
    EvalResult result;
    double area = 0.0;
    double validity_violation = 0.0;
    double max_deviatoric = 0.0;
};

/// Min-max deviatoric stress on the quarter plate with a voxelized hole.
class ShapeProblem final : public Problem {
  public:
    explicit ShapeProblem(ShapeProblemConfig cfg = {});

    std::string name() const override { return "shape"; }
    std::size_t dim() const override { return 5; }
    Bounds bounds() const override;
    int fidelity_levels() const override { return static_cast<int>(cfg_.fidelity_grids.size()); }
    std::vector<SolutionVector> seeds() const override;

    const ShapeProblemConfig& config() const { return cfg_; }
    const fem::Mesh& mesh(int fidelity) const { return meshes_[static_cast<std::size_t>(fidelity)]; }

    ShapeEvaluation evaluate_shape(const HoleSpline& s, int fidelity) const;

  protected:
    EvalResult evaluate_impl(const SolutionVector& x, int fidelity) const override;

  private:
    ShapeProblemConfig cfg_;
    std::vector<fem::Mesh> meshes_;
    std::vector<fem::ElasticBc> bcs_;
};

/// Fixed probe designs used for cross-fidelity rank comparisons.
std::vector<HoleSpline> probe_designs();

void write_boundary_csv(const std::vector<std::array<double, 2>>& polyline, const std::string& path);

}  // namespace physevo::shape
