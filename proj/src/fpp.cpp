#include "physevo/fpp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "physevo/errors.hpp"

namespace physevo::fpp {

namespace {

Eigen::Matrix3d patch_base_stiffness(const FppConfig& cfg) {
    return fem::orthotropic_plane_stress(cfg.E1, cfg.E2, cfg.nu12, cfg.G12);
}

/// Stress components seen from a frame rotated by +theta from global.
std::array<double, 3> rotate_stress_to_frame(const std::array<double, 3>& s, double theta) {
    const double c = std::cos(theta), si = std::sin(theta);
    const double sx = s[0], sy = s[1], txy = s[2];
    return {sx * c * c + sy * si * si + 2.0 * txy * c * si,
            sx * si * si + sy * c * c - 2.0 * txy * c * si,
            -(sx - sy) * c * si + txy * (c * c - si * si)};
}

}  // namespace

std::vector<Patch> decode_design(const SolutionVector& x, const FppConfig& cfg) {
    const Eigen::Matrix3d C = patch_base_stiffness(cfg);
    std::vector<Patch> out;
    out.reserve(static_cast<std::size_t>(cfg.patch_count));
    for (int i = 0; i < cfg.patch_count; ++i) {
        Patch p;
        p.x = x[3 * static_cast<std::size_t>(i)];
        p.y = x[3 * static_cast<std::size_t>(i) + 1];
        p.theta = x[3 * static_cast<std::size_t>(i) + 2];
        p.thickness = cfg.patch_thickness;
        p.width = cfg.patch_width;
        p.height = cfg.patch_height;
        p.stiffness = C;
        out.push_back(p);
    }
    return out;
}

bool point_in_patch(const Patch& p, double px, double py) {
    const double c = std::cos(p.theta), s = std::sin(p.theta);
    const double dx = px - p.x, dy = py - p.y;
    const double lx = c * dx + s * dy;   // patch-frame coordinates
    const double ly = -s * dx + c * dy;
    return std::abs(lx) <= 0.5 * p.width && std::abs(ly) <= 0.5 * p.height;
}

StiffnessField stiffness_field(const std::vector<Patch>& patches, const fem::Mesh& mesh,
                               const FppConfig& cfg) {
    StiffnessField field;
    const std::size_t ne = mesh.element_count();
    field.stiffness.resize(ne);
    field.thickness.assign(ne, 0.0);
    field.covering_patches.resize(ne);

    const Eigen::Matrix3d floor_stiffness =
        1e-6 * fem::isotropic_plane_stress(cfg.E1, 0.3);
    std::vector<Eigen::Matrix3d> rotated(patches.size());
    for (std::size_t i = 0; i < patches.size(); ++i)
        rotated[i] = fem::rotate_voigt_stiffness(patches[i].stiffness, patches[i].theta);

    for (std::size_t e = 0; e < ne; ++e) {
        const auto c = mesh.centroid(e);
        double total_t = 0.0;
        Eigen::Matrix3d acc = Eigen::Matrix3d::Zero();
        for (std::size_t i = 0; i < patches.size(); ++i) {
            if (!point_in_patch(patches[i], c[0], c[1])) continue;
            field.covering_patches[e].push_back(static_cast<int>(i));
            total_t += patches[i].thickness;
            acc += patches[i].thickness * rotated[i];
        }
        field.thickness[e] = total_t;
        field.stiffness[e] = total_t > 0.0 ? Eigen::Matrix3d(acc / total_t) : floor_stiffness;
    }
    return field;
}

double hashin_index(double s11, double s22, double s12, const StrengthLimits& limits) {
    const double shear = s12 / limits.S;
    double index = 0.0;
    if (s11 >= 0.0) {
        const double r = s11 / limits.Xt;
        index = std::max(index, r * r + shear * shear);
    } else {
        const double r = s11 / limits.Xc;
        index = std::max(index, r * r);
    }
    if (s22 >= 0.0) {
        const double r = s22 / limits.Yt;
        index = std::max(index, r * r + shear * shear);
    } else {
        // Hashin's transverse-compressive mode.
        const double q = s22 / (2.0 * limits.S);
        const double yc_over_2s = limits.Yc / (2.0 * limits.S);
        index = std::max(index, q * q + (yc_over_2s * yc_over_2s - 1.0) * (s22 / limits.Yc) +
                                    shear * shear);
    }
    return index;
}

double position_violation(const Patch& p, const FppConfig& cfg) {
    const double c = std::cos(p.theta), s = std::sin(p.theta);
    int outside = 0;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            const double lx = (static_cast<double>(i) / 3.0 - 0.5) * p.width;
            const double ly = (static_cast<double>(j) / 3.0 - 0.5) * p.height;
            const double gx = p.x + c * lx - s * ly;
            const double gy = p.y + s * lx + c * ly;
            if (gx < 0.0 || gx > cfg.plate_width || gy < 0.0 || gy > cfg.plate_height) ++outside;
        }
    }
    return static_cast<double>(outside) / 16.0;
}

double thickness_jump_penalty(const StiffnessField& field, const fem::Mesh& mesh) {
    double penalty = 0.0;
    for (const auto& edge : fem::interior_edges(mesh))
        penalty += std::abs(field.thickness[static_cast<std::size_t>(edge.a)] -
                            field.thickness[static_cast<std::size_t>(edge.b)]) *
                   edge.length;
    return penalty;
}

FppProblem::FppProblem(FppConfig cfg) : cfg_(std::move(cfg)) {
    if (cfg_.patch_count < 1) throw InvalidParams("fpp: patch_count must be >= 1");
    mesh_ = fem::build_rectangle_mesh(cfg_.mesh_nx, cfg_.mesh_ny, cfg_.plate_width, cfg_.plate_height);
    edges_ = fem::interior_edges(mesh_);

    // Clamp the left edge, pull the right edge in +x.
    for (std::size_t n = 0; n < mesh_.node_count(); ++n) {
        if (mesh_.nodes[n][0] == 0.0) {
            bc_.dirichlet.push_back({static_cast<int>(n), 0, 0.0});
            bc_.dirichlet.push_back({static_cast<int>(n), 1, 0.0});
        }
    }
    std::vector<int> right;
    for (std::size_t n = 0; n < mesh_.node_count(); ++n)
        if (std::abs(mesh_.nodes[n][0] - cfg_.plate_width) < 1e-12 * cfg_.plate_width)
            right.push_back(static_cast<int>(n));
    std::sort(right.begin(), right.end(), [&](int a, int b) {
        return mesh_.nodes[static_cast<std::size_t>(a)][1] < mesh_.nodes[static_cast<std::size_t>(b)][1];
    });
    for (std::size_t i = 0; i + 1 < right.size(); ++i)
        bc_.neumann.push_back({right[i], right[i + 1], cfg_.traction, 0.0});
}

Bounds FppProblem::bounds() const {
    Bounds b;
    for (int i = 0; i < cfg_.patch_count; ++i) {
        b.lower.insert(b.lower.end(), {0.0, 0.0, -1.5707963267948966});
        b.upper.insert(b.upper.end(), {cfg_.plate_width, cfg_.plate_height, 1.5707963267948966});
    }
    return b;
}

std::vector<SolutionVector> FppProblem::seeds() const { return {principal_stress_seed()}; }

DesignEvaluation FppProblem::evaluate_design(const SolutionVector& x) const {
    DesignEvaluation out;
    const std::vector<Patch> patches = decode_design(x, cfg_);
    out.field = stiffness_field(patches, mesh_, cfg_);

    // Thickness folds into the membrane stiffness. Uncovered elements keep
    // the unthinned floor matrix: still ~1e-3 of any patched element, but
    // stiff enough that bare-region displacements stay numerically benign.
    std::vector<Eigen::Matrix3d> C_eff(mesh_.element_count());
    for (std::size_t e = 0; e < mesh_.element_count(); ++e) {
        const double t = out.field.thickness[e];
        C_eff[e] = t > 0.0 ? Eigen::Matrix3d(t * out.field.stiffness[e]) : out.field.stiffness[e];
    }

    const fem::SpdSystem sys = fem::assemble_elastic(mesh_, C_eff, bc_);
    const Eigen::VectorXd u = fem::solve_spd(sys);
    out.solution = fem::element_fields(mesh_, u, C_eff);

    double outside_area = 0.0, total_area = 0.0;
    for (const Patch& p : patches) {
        const double area = p.width * p.height;
        outside_area += position_violation(p, cfg_) * area;
        total_area += area;
    }

    // Layer stresses under the equal-strain assumption, checked per covering
    // patch in that patch's material frame.
    double max_index = 0.0;
    for (std::size_t e = 0; e < mesh_.element_count(); ++e) {
        if (out.field.covering_patches[e].empty()) continue;
        const std::array<double, 3> eps = out.solution.element_strain[e];
        const Eigen::Vector3d eps_v(eps[0], eps[1], eps[2]);
        for (int pi : out.field.covering_patches[e]) {
            const Patch& p = patches[static_cast<std::size_t>(pi)];
            const Eigen::Vector3d sg = fem::rotate_voigt_stiffness(p.stiffness, p.theta) * eps_v;
            const std::array<double, 3> sm = rotate_stress_to_frame({sg[0], sg[1], sg[2]}, p.theta);
            max_index = std::max(max_index, hashin_index(sm[0], sm[1], sm[2], cfg_.limits));
        }
    }
    out.max_hashin = max_index;

    out.result.objective = out.solution.compliance;
    out.result.hard_violations = {outside_area / total_area, std::max(0.0, max_index - 1.0)};
    double jump = 0.0;
    for (const auto& edge : edges_)
        jump += std::abs(out.field.thickness[static_cast<std::size_t>(edge.a)] -
                         out.field.thickness[static_cast<std::size_t>(edge.b)]) *
                edge.length;
    out.result.soft_penalties = {cfg_.thickness_jump_weight * jump};
    return out;
}

SolutionVector FppProblem::principal_stress_seed() const {
    // Solve the bare isotropic plate once and align each patch with the local
    // principal stress direction at its seed position.
    std::vector<Eigen::Matrix3d> C(mesh_.element_count(),
                                   cfg_.patch_thickness * fem::isotropic_plane_stress(cfg_.E1, 0.3));
    const fem::SpdSystem sys = fem::assemble_elastic(mesh_, C, bc_);
    const Eigen::VectorXd u = fem::solve_spd(sys);
    const fem::FemSolution sol = fem::element_fields(mesh_, u, C);

    // Spread patch centers over a near-square grid covering the plate.
    int cols = 1;
    while (cols * cols < cfg_.patch_count) ++cols;
    const int rows = (cfg_.patch_count + cols - 1) / cols;

    const Bounds b = bounds();
    SolutionVector seed(dim());
    for (int i = 0; i < cfg_.patch_count; ++i) {
        const int r = i / cols, col = i % cols;
        const double px = (col + 0.5) * cfg_.plate_width / cols;
        const double py = (r + 0.5) * cfg_.plate_height / rows;

        std::size_t nearest = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t e = 0; e < mesh_.element_count(); ++e) {
            const auto c = mesh_.centroid(e);
            const double d = std::hypot(c[0] - px, c[1] - py);
            if (d < best) { best = d; nearest = e; }
        }
        const auto& s = sol.element_stress[nearest];
        double theta = 0.5 * std::atan2(2.0 * s[2], s[0] - s[1]);
        theta = std::clamp(theta, b.lower[3 * static_cast<std::size_t>(i) + 2],
                           b.upper[3 * static_cast<std::size_t>(i) + 2]);
        seed[3 * static_cast<std::size_t>(i)] = px;
        seed[3 * static_cast<std::size_t>(i) + 1] = py;
        seed[3 * static_cast<std::size_t>(i) + 2] = theta;
    }
    return seed;
}

EvalResult FppProblem::evaluate_impl(const SolutionVector& x, int) const {
    return evaluate_design(x).result;
}

void write_design_csv(const std::vector<Patch>& patches, const std::string& path) {
    std::ofstream out(path);
    out << "patch,x,y,theta\n";
    for (std::size_t i = 0; i < patches.size(); ++i)
        out << i << ',' << patches[i].x << ',' << patches[i].y << ',' << patches[i].theta << '\n';
}

}  // namespace physevo::fpp
