#include "physevo/shape.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "physevo/errors.hpp"

namespace physevo::shape {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::array<double, 2> bezier2(const std::array<double, 2>& a, const std::array<double, 2>& b,
                              const std::array<double, 2>& c, double t) {
    const double u = 1.0 - t;
    return {u * u * a[0] + 2.0 * u * t * b[0] + t * t * c[0],
            u * u * a[1] + 2.0 * u * t * b[1] + t * t * c[1]};
}

bool segments_cross(const std::array<double, 2>& p1, const std::array<double, 2>& p2,
                    const std::array<double, 2>& q1, const std::array<double, 2>& q2) {
    auto orient = [](const std::array<double, 2>& a, const std::array<double, 2>& b,
                     const std::array<double, 2>& c) {
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
    };
    const double o1 = orient(p1, p2, q1), o2 = orient(p1, p2, q2);
    const double o3 = orient(q1, q2, p1), o4 = orient(q1, q2, p2);
    return o1 * o2 < 0.0 && o3 * o4 < 0.0;
}

int self_intersections(const std::vector<std::array<double, 2>>& poly, bool closed) {
    const std::size_t n = poly.size();
    if (n < 4) return 0;
    const std::size_t seg_count = closed ? n : n - 1;
    int crossings = 0;
    for (std::size_t i = 0; i < seg_count; ++i) {
        for (std::size_t j = i + 2; j < seg_count; ++j) {
            if (closed && i == 0 && j == seg_count - 1) continue;  // adjacent around the wrap
            if (segments_cross(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n])) ++crossings;
        }
    }
    return crossings;
}

bool point_in_polygon(const std::vector<std::array<double, 2>>& poly, double px, double py) {
    bool inside = false;
    for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
        const auto& a = poly[i];
        const auto& b = poly[j];
        if ((a[1] > py) != (b[1] > py) &&
            px < (b[0] - a[0]) * (py - a[1]) / (b[1] - a[1]) + a[0])
            inside = !inside;
    }
    return inside;
}

}  // namespace

HoleSpline decode_spline(const SolutionVector& x) {
    return HoleSpline{x[0], x[1], x[2], x[3], x[4]};
}

SolutionVector encode_spline(const HoleSpline& s) {
    return {s.p11, s.p12, s.p22, s.p23, s.psi2};
}

double validity(const HoleSpline& s, const ShapeProblemConfig& cfg) {
    const double hw = cfg.half_width;
    double v = 0.0;
    v += std::max(0.0, -s.p11) + std::max(0.0, s.p11 - hw);
    v += std::max(0.0, -s.p23) + std::max(0.0, s.p23 - hw);
    v += std::max(0.0, -s.p12) + std::max(0.0, s.p12 - hw);
    v += std::max(0.0, -s.p22) + std::max(0.0, s.p22 - hw);
    v += std::max(0.0, kPi / 2.0 - s.psi2) + std::max(0.0, s.psi2 - kPi);
    if (v == 0.0 && s.p11 > 0.0 && s.p23 > 0.0) {
        const auto quadrant = hole_boundary(s, 64);
        v += self_intersections(quadrant, /*closed=*/false);
    }
    return v;
}

std::vector<std::array<double, 2>> hole_boundary(const HoleSpline& s, int samples) {
    if (samples < 3) throw InvalidSpline("shape: need at least 3 boundary samples");
    const std::array<double, 2> n1{s.p11, 0.0};
    const std::array<double, 2> n2{s.p12, s.p22};
    const std::array<double, 2> n3{0.0, s.p23};
    const double tx = std::cos(s.psi2), ty = std::sin(s.psi2);
    const double la = std::hypot(n2[0] - n1[0], n2[1] - n1[1]);
    const double lb = std::hypot(n3[0] - n2[0], n3[1] - n2[1]);
    const std::array<double, 2> qa{n2[0] - 0.5 * la * tx, n2[1] - 0.5 * la * ty};
    const std::array<double, 2> qb{n2[0] + 0.5 * lb * tx, n2[1] + 0.5 * lb * ty};

    std::vector<std::array<double, 2>> out;
    out.reserve(static_cast<std::size_t>(samples));
    const int first = samples / 2;         // samples on segment N1->N2, excluding N2
    const int second = samples - first;    // samples on N2->N3, including both ends
    for (int i = 0; i < first; ++i)
        out.push_back(bezier2(n1, qa, n2, static_cast<double>(i) / first));
    for (int i = 0; i < second; ++i)
        out.push_back(bezier2(n2, qb, n3, static_cast<double>(i) / (second - 1)));
    return out;
}

std::vector<std::array<double, 2>> closed_boundary(const HoleSpline& s, int samples_per_quadrant) {
    const auto q = hole_boundary(s, samples_per_quadrant);
    std::vector<std::array<double, 2>> out;
    out.reserve(4 * q.size());
    for (const auto& p : q) out.push_back(p);
    for (auto it = q.rbegin(); it != q.rend(); ++it) out.push_back({-(*it)[0], (*it)[1]});
    for (const auto& p : q) out.push_back({-p[0], -p[1]});
    for (auto it = q.rbegin(); it != q.rend(); ++it) out.push_back({(*it)[0], -(*it)[1]});
    return out;
}

double enclosed_area(const std::vector<std::array<double, 2>>& poly) {
    if (self_intersections(poly, /*closed=*/true) > 0)
        throw SelfIntersecting("shape: boundary polyline crosses itself");
    double twice = 0.0;
    for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++)
        twice += poly[j][0] * poly[i][1] - poly[i][0] * poly[j][1];
    return 0.5 * std::abs(twice);
}

ShapeProblem::ShapeProblem(ShapeProblemConfig cfg) : cfg_(std::move(cfg)) {
    if (cfg_.fidelity_grids.empty()) throw InvalidParams("shape: no fidelity grids configured");
    if (cfg_.mu <= 0.0 || cfg_.lambda + cfg_.mu <= 0.0)
        throw InvalidParams("shape: Lamé parameters not admissible");
    for (const auto& [nx, ny] : cfg_.fidelity_grids) {
        fem::Mesh mesh = fem::build_rectangle_mesh(nx, ny, cfg_.half_width, cfg_.half_width);
        fem::ElasticBc bc;
        // Symmetry: roller supports on both axes.
        for (std::size_t n = 0; n < mesh.node_count(); ++n) {
            if (mesh.nodes[n][0] == 0.0) bc.dirichlet.push_back({static_cast<int>(n), 0, 0.0});
            if (mesh.nodes[n][1] == 0.0) bc.dirichlet.push_back({static_cast<int>(n), 1, 0.0});
        }
        auto edge_nodes = [&](int axis, double coord) {
            std::vector<int> nodes;
            for (std::size_t n = 0; n < mesh.node_count(); ++n)
                if (std::abs(mesh.nodes[n][axis] - coord) < 1e-12) nodes.push_back(static_cast<int>(n));
            std::sort(nodes.begin(), nodes.end(), [&](int a, int b) {
                return mesh.nodes[static_cast<std::size_t>(a)][1 - axis] <
                       mesh.nodes[static_cast<std::size_t>(b)][1 - axis];
            });
            return nodes;
        };
        const std::vector<int> right = edge_nodes(0, cfg_.half_width);
        for (std::size_t i = 0; i + 1 < right.size(); ++i)
            bc.neumann.push_back({right[i], right[i + 1], cfg_.traction_x, 0.0});
        const std::vector<int> top = edge_nodes(1, cfg_.half_width);
        for (std::size_t i = 0; i + 1 < top.size(); ++i)
            bc.neumann.push_back({top[i], top[i + 1], 0.0, cfg_.traction_y});
        meshes_.push_back(std::move(mesh));
        bcs_.push_back(std::move(bc));
    }
}

Bounds ShapeProblem::bounds() const {
    const double hw = cfg_.half_width;
    return Bounds{{0.05 * hw, 0.05 * hw, 0.05 * hw, 0.05 * hw, kPi / 2.0 + 0.05},
                  {0.9 * hw, 0.9 * hw, 0.9 * hw, 0.9 * hw, kPi - 0.05}};
}

std::vector<SolutionVector> ShapeProblem::seeds() const {
    // Near-circular hole just above the area floor.
    const double r = std::min(0.85 * cfg_.half_width, 1.05 * std::sqrt(cfg_.a_min / kPi));
    return {encode_spline(HoleSpline{r, r / std::sqrt(2.0), r / std::sqrt(2.0), r, 0.75 * kPi})};
}

ShapeEvaluation ShapeProblem::evaluate_shape(const HoleSpline& s, int fidelity) const {
    ShapeEvaluation out;
    out.validity_violation = validity(s, cfg_);

    bool have_boundary = false;
    std::vector<std::array<double, 2>> quadrant;
    if (s.p11 > 0.0 && s.p23 > 0.0 && s.p12 >= 0.0 && s.p22 >= 0.0) {
        quadrant = hole_boundary(s, cfg_.boundary_samples);
        have_boundary = true;
        try {
            out.area = enclosed_area(closed_boundary(s, cfg_.boundary_samples));
        } catch (const SelfIntersecting&) {
            out.area = 0.0;
            have_boundary = false;  // crossing curve: treat the hole as absent
        }
    }

    const fem::Mesh& mesh = meshes_[static_cast<std::size_t>(fidelity)];
    const fem::ElasticBc& bc = bcs_[static_cast<std::size_t>(fidelity)];

    // Hole region in the quarter plate: inside the polygon closed through the
    // origin along the two symmetry axes.
    std::vector<std::array<double, 2>> hole_poly;
    if (have_boundary) {
        hole_poly.reserve(quadrant.size() + 1);
        hole_poly.push_back({0.0, 0.0});
        hole_poly.insert(hole_poly.end(), quadrant.begin(), quadrant.end());
    }

    const Eigen::Matrix3d solid = fem::isotropic_plane_stress_lame(cfg_.lambda, cfg_.mu);
    const Eigen::Matrix3d voided = 1e-6 * solid;
    std::vector<Eigen::Matrix3d> C(mesh.element_count());
    std::vector<bool> is_void(mesh.element_count(), false);
    for (std::size_t e = 0; e < mesh.element_count(); ++e) {
        const auto c = mesh.centroid(e);
        const bool in_hole = have_boundary && point_in_polygon(hole_poly, c[0], c[1]);
        is_void[e] = in_hole;
        C[e] = in_hole ? voided : solid;
    }

    // Pin nodes that touch only void elements; they carry no load path and
    // would otherwise drift by huge factors through the 1e-6 floor.
    fem::ElasticBc bc_eval = bc;
    {
        std::vector<bool> touches_solid(mesh.node_count(), false);
        for (std::size_t e = 0; e < mesh.element_count(); ++e) {
            if (is_void[e]) continue;
            for (int k = 0; k < 3; ++k)
                touches_solid[static_cast<std::size_t>(mesh.triangles[e][k])] = true;
        }
        for (std::size_t n = 0; n < mesh.node_count(); ++n) {
            if (touches_solid[n]) continue;
            bc_eval.dirichlet.push_back({static_cast<int>(n), 0, 0.0});
            bc_eval.dirichlet.push_back({static_cast<int>(n), 1, 0.0});
        }
    }
    const fem::SpdSystem sys = fem::assemble_elastic(mesh, C, bc_eval);
    const Eigen::VectorXd u = fem::solve_spd(sys);
    const fem::FemSolution sol = fem::element_fields(mesh, u, C);

    double max_dev = 0.0;
    for (std::size_t e = 0; e < mesh.element_count(); ++e)
        if (!is_void[e]) max_dev = std::max(max_dev, fem::deviatoric_norm(sol.element_stress[e]));
    out.max_deviatoric = max_dev;

    out.result.objective = max_dev;
    out.result.hard_violations = {std::max(0.0, cfg_.a_min - out.area), out.validity_violation};
    out.result.soft_penalties = {};
    return out;
}

EvalResult ShapeProblem::evaluate_impl(const SolutionVector& x, int fidelity) const {
    const HoleSpline s = decode_spline(x);
    try {
        return evaluate_shape(s, fidelity).result;
    } catch (const NoConvergence&) {
        // Extreme stress concentrations (hole grazing the plate edge) can
        // defeat the solver's fixed tolerance; cap instead of aborting a run.
        EvalResult r;
        r.objective = 1e9;
        double area = 0.0;
        try {
            area = enclosed_area(closed_boundary(s, cfg_.boundary_samples));
        } catch (const Error&) {
        }
        r.hard_violations = {std::max(0.0, cfg_.a_min - area), validity(s, cfg_)};
        return r;
    }
}

std::vector<HoleSpline> probe_designs() {
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    return {
        HoleSpline{0.40, 0.40 * inv_sqrt2, 0.40 * inv_sqrt2, 0.40, 0.75 * kPi},   // circle r=0.4
        HoleSpline{0.60, 0.60 * inv_sqrt2, 0.30 * inv_sqrt2, 0.30, 0.80 * kPi},   // 2:1 ellipse-like
        HoleSpline{0.25, 0.25 * inv_sqrt2, 0.25 * inv_sqrt2, 0.25, 0.75 * kPi},   // small circle
        HoleSpline{0.50, 0.30, 0.30, 0.50, 0.70 * kPi},                           // boxy bulge
        HoleSpline{0.30, 0.30 * inv_sqrt2, 0.60 * inv_sqrt2, 0.60, 0.70 * kPi},   // tall 1:2
    };
}

void write_boundary_csv(const std::vector<std::array<double, 2>>& polyline, const std::string& path) {
    std::ofstream out(path);
    out << "x,y\n";
    for (const auto& p : polyline) out << p[0] << ',' << p[1] << '\n';
}

}  // namespace physevo::shape
