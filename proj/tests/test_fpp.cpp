#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <vector>

#include "doctest.h"
#include "physevo/fpp.hpp"
#include "physevo/rng.hpp"

using namespace physevo;
using namespace physevo::fpp;

namespace {

FppConfig small_config() {
    FppConfig cfg;
    cfg.patch_count = 2;
    cfg.mesh_nx = 8;
    cfg.mesh_ny = 4;
    return cfg;
}

Patch make_patch(const FppConfig& cfg, double x, double y, double theta) {
    Patch p;
    p.x = x;
    p.y = y;
    p.theta = theta;
    p.thickness = cfg.patch_thickness;
    p.width = cfg.patch_width;
    p.height = cfg.patch_height;
    p.stiffness = fem::orthotropic_plane_stress(cfg.E1, cfg.E2, cfg.nu12, cfg.G12);
    return p;
}

}  // namespace

TEST_CASE("hashin boundary cases") {
    StrengthLimits lim;
    CHECK(hashin_index(0.0, 0.0, 0.0, lim) == doctest::Approx(0.0));
    CHECK(hashin_index(lim.Xt, 0.0, 0.0, lim) == doctest::Approx(1.0));
    CHECK(hashin_index(-lim.Xc, 0.0, 0.0, lim) == doctest::Approx(1.0));
    CHECK(hashin_index(0.0, lim.Yt, 0.0, lim) == doctest::Approx(1.0));
    CHECK(hashin_index(0.0, 0.0, lim.S / 2.0, lim) == doctest::Approx(0.25));
    // Combined fiber tension + shear: (0.5)^2 + (0.5)^2.
    CHECK(hashin_index(lim.Xt / 2.0, 0.0, lim.S / 2.0, lim) == doctest::Approx(0.5));
}

TEST_CASE("point_in_patch respects rotation") {
    FppConfig cfg = small_config();
    Patch p = make_patch(cfg, 1.0, 0.5, 0.0);
    CHECK(point_in_patch(p, 1.0, 0.5));
    CHECK(point_in_patch(p, 1.0 + 0.24, 0.5));
    CHECK_FALSE(point_in_patch(p, 1.0 + 0.26, 0.5));  // beyond width/2
    CHECK_FALSE(point_in_patch(p, 1.0, 0.5 + 0.13));  // beyond height/2

    Patch q = make_patch(cfg, 1.0, 0.5, M_PI / 2.0);  // rotated: width along y
    CHECK(point_in_patch(q, 1.0, 0.5 + 0.24));
    CHECK_FALSE(point_in_patch(q, 1.0 + 0.24, 0.5));
}

TEST_CASE("one patch covering the whole plate sets C = rot(C1, theta), T = t1") {
    FppConfig cfg = small_config();
    fem::Mesh mesh = fem::build_rectangle_mesh(cfg.mesh_nx, cfg.mesh_ny, cfg.plate_width, cfg.plate_height);
    Patch big = make_patch(cfg, cfg.plate_width / 2, cfg.plate_height / 2, 0.3);
    big.width = 3.0;
    big.height = 2.0;
    StiffnessField field = stiffness_field({big}, mesh, cfg);
    Eigen::Matrix3d expected = fem::rotate_voigt_stiffness(big.stiffness, 0.3);
    for (std::size_t e = 0; e < mesh.element_count(); ++e) {
        CHECK(field.thickness[e] == doctest::Approx(cfg.patch_thickness));
        CHECK((field.stiffness[e] - expected).cwiseAbs().maxCoeff() <
              1e-9 * expected.cwiseAbs().maxCoeff());
        CHECK(field.covering_patches[e] == std::vector<int>{0});
    }
}

TEST_CASE("two coincident patches double the thickness, same averaged C") {
    FppConfig cfg = small_config();
    fem::Mesh mesh = fem::build_rectangle_mesh(cfg.mesh_nx, cfg.mesh_ny, cfg.plate_width, cfg.plate_height);
    Patch a = make_patch(cfg, 1.0, 0.5, 0.2);
    StiffnessField one = stiffness_field({a}, mesh, cfg);
    StiffnessField two = stiffness_field({a, a}, mesh, cfg);
    for (std::size_t e = 0; e < mesh.element_count(); ++e) {
        if (one.covering_patches[e].empty()) continue;
        CHECK(two.thickness[e] == doctest::Approx(2.0 * one.thickness[e]));
        // Same thickness-averaged material; only the total thickness doubles.
        CHECK((two.stiffness[e] - one.stiffness[e]).cwiseAbs().maxCoeff() <
              1e-9 * one.stiffness[e].cwiseAbs().maxCoeff());
    }
}

TEST_CASE("stiffness field is SPD on every element, covered or not") {
    FppConfig cfg = small_config();
    fem::Mesh mesh = fem::build_rectangle_mesh(cfg.mesh_nx, cfg.mesh_ny, cfg.plate_width, cfg.plate_height);
    Patch a = make_patch(cfg, 0.5, 0.25, 0.7);
    StiffnessField field = stiffness_field({a}, mesh, cfg);
    bool any_uncovered = false;
    for (std::size_t e = 0; e < mesh.element_count(); ++e) {
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(field.stiffness[e]);
        CHECK(es.eigenvalues().minCoeff() > 0.0);
        if (field.covering_patches[e].empty()) any_uncovered = true;
    }
    CHECK(any_uncovered);
}

TEST_CASE("position violation: inside zero, half outside about one half") {
    FppConfig cfg = small_config();
    Patch inside = make_patch(cfg, 1.0, 0.5, 0.0);
    CHECK(position_violation(inside, cfg) == doctest::Approx(0.0));

    Patch half_out = make_patch(cfg, 0.0, 0.5, 0.0);  // centered on the left edge
    CHECK(position_violation(half_out, cfg) == doctest::Approx(0.5).epsilon(0.1));

    Patch corner_out = make_patch(cfg, 0.05, 0.05, 0.0);
    CHECK(position_violation(corner_out, cfg) > 0.0);

    Patch fully_out = make_patch(cfg, -2.0, 0.5, 0.0);
    CHECK(position_violation(fully_out, cfg) == doctest::Approx(1.0));
}

TEST_CASE("uniform thickness has zero jump penalty") {
    FppConfig cfg = small_config();
    fem::Mesh mesh = fem::build_rectangle_mesh(cfg.mesh_nx, cfg.mesh_ny, cfg.plate_width, cfg.plate_height);
    Patch big = make_patch(cfg, cfg.plate_width / 2, cfg.plate_height / 2, 0.0);
    big.width = 3.0;
    big.height = 2.0;
    StiffnessField field = stiffness_field({big}, mesh, cfg);
    CHECK(thickness_jump_penalty(field, mesh) == doctest::Approx(0.0));
}

TEST_CASE("half-plate patch pays its border length in jump penalty") {
    FppConfig cfg = small_config();
    fem::Mesh mesh = fem::build_rectangle_mesh(cfg.mesh_nx, cfg.mesh_ny, cfg.plate_width, cfg.plate_height);
    // Patch covering exactly the left half: border is the vertical midline.
    Patch half = make_patch(cfg, 0.5, 0.5, 0.0);
    half.width = 1.0;   // spans x in [0, 1]
    half.height = 2.0;  // spans all of y
    StiffnessField field = stiffness_field({half}, mesh, cfg);
    // Expected: t1 times the length of the thickness discontinuity. With the
    // element pitch of 0.25 x 0.25 the boundary runs along x = 1 (length 1)
    // plus the diagonal staircase contribution of the crossed elements.
    double penalty = thickness_jump_penalty(field, mesh);
    CHECK(penalty > 0.0);
    // Count the discontinuity edges directly as the oracle.
    double expected = 0.0;
    for (const auto& edge : fem::interior_edges(mesh))
        expected += std::abs(field.thickness[edge.a] - field.thickness[edge.b]) * edge.length;
    CHECK(penalty == doctest::Approx(expected));
    CHECK(expected >= cfg.patch_thickness * cfg.plate_height);
}

TEST_CASE("stacking a second patch over the load path lowers the compliance") {
    FppConfig one_cfg = small_config();
    one_cfg.patch_count = 1;
    FppConfig two_cfg = small_config();
    two_cfg.patch_count = 2;
    FppProblem single(one_cfg), stacked(two_cfg);
    DesignEvaluation a = single.evaluate_design({1.0, 0.5, 0.0});
    DesignEvaluation b = stacked.evaluate_design({1.0, 0.5, 0.0, 1.0, 0.5, 0.0});
    CHECK(b.result.objective < a.result.objective);
}

TEST_CASE("problem dimensions, bounds, and seed validity") {
    FppConfig cfg;
    FppProblem prob(cfg);
    CHECK(prob.dim() == 24);
    Bounds b = prob.bounds();
    CHECK(b.lower[0] == doctest::Approx(0.0));
    CHECK(b.upper[0] == doctest::Approx(cfg.plate_width));
    CHECK(b.upper[1] == doctest::Approx(cfg.plate_height));
    CHECK(b.lower[2] == doctest::Approx(-M_PI / 2));
    CHECK(b.upper[2] == doctest::Approx(M_PI / 2));
    auto seeds = prob.seeds();
    REQUIRE(seeds.size() >= 1);
    for (const auto& s : seeds) CHECK(b.contains(s));
}

TEST_CASE("evaluation reports violations in order [position, strength]") {
    FppConfig cfg = small_config();
    FppProblem prob(cfg);
    // In-bounds but partially outside: x = 0 puts the patch half outside.
    EvalResult r = prob.evaluate({0.0, 0.5, 0.0, 1.5, 0.5, 0.0});
    REQUIRE(r.hard_violations.size() == 2);
    CHECK(r.hard_violations[0] > 0.0);
    REQUIRE(r.soft_penalties.size() == 1);
    CHECK(r.soft_penalties[0] > 0.0);  // thickness jumps at patch borders
    CHECK(r.objective > 0.0);

    EvalResult ok = prob.evaluate({0.7, 0.5, 0.0, 1.3, 0.5, 0.0});
    CHECK(ok.hard_violations[0] == doctest::Approx(0.0));
}

TEST_CASE("design CSV export writes one row per patch") {
    FppConfig cfg = small_config();
    std::vector<Patch> patches{make_patch(cfg, 0.5, 0.25, 0.1), make_patch(cfg, 1.5, 0.75, -0.4)};
    std::string path = "fpp_test_design.csv";
    write_design_csv(patches, path);
    FILE* f = std::fopen(path.c_str(), "r");
    REQUIRE(f != nullptr);
    char line[256];
    int rows = 0;
    while (std::fgets(line, sizeof line, f)) ++rows;
    std::fclose(f);
    std::remove(path.c_str());
    CHECK(rows == 3);  // header + 2 patches
}
