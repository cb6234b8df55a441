#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdio>
#include <vector>

#include "doctest.h"
#include "physevo/eit.hpp"

using namespace physevo;
using namespace physevo::eit;

namespace {

struct Setup {
    fem::Mesh mesh;
    ElectrodeLayout layout;
    MeasurementSchedule schedule;
};

Setup adjacent_setup(int L, int rings, int sectors) {
    Setup s;
    s.mesh = fem::build_disk_mesh(rings, sectors, 1.0);
    s.layout = make_layout(s.mesh, L, 1.0);
    s.schedule = measurement_schedule(s.layout, Strategy::Adjacent);
    return s;
}

}  // namespace

TEST_CASE("adjacent schedule count is L(L-3)") {
    for (int L : {8, 16, 32}) {
        Setup s = adjacent_setup(L, 4, 2 * L);
        CAPTURE(L);
        CHECK(s.schedule.count() == static_cast<std::size_t>(L * (L - 3)));
    }
}

TEST_CASE("measured electrodes never touch the driven pair") {
    Setup s = adjacent_setup(16, 4, 32);
    for (const auto& e : s.schedule.entries) {
        CHECK(e.meas_a != e.drive_a);
        CHECK(e.meas_a != e.drive_b);
        CHECK(e.meas_b != e.drive_a);
        CHECK(e.meas_b != e.drive_b);
    }
}

TEST_CASE("unsupported strategies raise") {
    Setup s = adjacent_setup(8, 3, 16);
    CHECK_THROWS_AS(measurement_schedule(s.layout, Strategy::Cross), UnsupportedStrategy);
    CHECK(strategy_from_string("adjacent") == Strategy::Adjacent);
    CHECK_THROWS(strategy_from_string("spiral"));
}

TEST_CASE("electrode layout spacing requires a compatible boundary") {
    fem::Mesh mesh = fem::build_disk_mesh(3, 16, 1.0);
    ElectrodeLayout layout = make_layout(mesh, 8, 1.0);
    REQUIRE(layout.nodes.size() == 8);
    // Equally spaced: every second boundary node.
    for (int e = 0; e < 8; ++e) CHECK(layout.nodes[e] == mesh.boundary_nodes[2 * e]);
}

TEST_CASE("reciprocity: swapped drive and measure pairs give the same voltage") {
    Setup s = adjacent_setup(16, 6, 48);
    std::vector<double> sigma(s.mesh.element_count(), 0.4);
    std::vector<double> u = forward_voltages(s.mesh, s.layout, s.schedule, sigma);

    double scale = 0.0;
    for (double v : u) scale = std::max(scale, std::abs(v));
    int checked = 0;
    for (std::size_t i = 0; i < s.schedule.entries.size(); ++i) {
        const auto& a = s.schedule.entries[i];
        for (std::size_t j = 0; j < s.schedule.entries.size(); ++j) {
            const auto& b = s.schedule.entries[j];
            if (b.drive_a == a.meas_a && b.drive_b == a.meas_b && b.meas_a == a.drive_a &&
                b.meas_b == a.drive_b) {
                CHECK(std::abs(u[i] - u[j]) <= 1e-9 * scale);
                ++checked;
            }
        }
    }
    CHECK(checked > 0);
}

TEST_CASE("homogeneous voltages are invariant under rotation by one electrode") {
    Setup s = adjacent_setup(16, 6, 48);
    std::vector<double> sigma(s.mesh.element_count(), 1.0);
    std::vector<double> u = forward_voltages(s.mesh, s.layout, s.schedule, sigma);
    const int L = 16;
    double scale = 0.0;
    for (double v : u) scale = std::max(scale, std::abs(v));
    // Rotating every electrode index by one spacing maps measurement
    // (drive (d, d+1), measure (m, m+1)) onto another schedule entry with the
    // same voltage.
    auto value_of = [&](int d1, int m1) -> double {
        for (std::size_t i = 0; i < s.schedule.entries.size(); ++i) {
            const auto& e = s.schedule.entries[i];
            if (e.drive_a == d1 && e.meas_a == m1) return u[i];
        }
        REQUIRE(false);
        return 0.0;
    };
    for (std::size_t i = 0; i < s.schedule.entries.size(); ++i) {
        const auto& e = s.schedule.entries[i];
        double rotated = value_of((e.drive_a + 1) % L, (e.meas_a + 1) % L);
        CHECK(std::abs(u[i] - rotated) <= 1e-9 * scale);
    }
}

TEST_CASE("scaling sigma by c scales voltages by 1/c") {
    Setup s = adjacent_setup(8, 4, 24);
    std::vector<double> sigma(s.mesh.element_count(), 0.5);
    std::vector<double> sigma3(s.mesh.element_count(), 1.5);
    std::vector<double> u1 = forward_voltages(s.mesh, s.layout, s.schedule, sigma);
    std::vector<double> u3 = forward_voltages(s.mesh, s.layout, s.schedule, sigma3);
    double scale = 0.0;
    for (double v : u1) scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i < u1.size(); ++i)
        CHECK(std::abs(u3[i] - u1[i] / 3.0) <= 1e-10 * scale);
}

TEST_CASE("misfit arithmetic and the Tikhonov term") {
    std::vector<double> pred{1.0, 2.0, 3.0};
    std::vector<double> meas{1.0, 2.5, 2.0};
    CHECK(misfit(pred, pred) == doctest::Approx(0.0));
    CHECK(misfit(pred, meas) == doctest::Approx(0.25 + 1.0));
    std::vector<double> sigma{0.4, 0.2};
    // Tikhonov: lambda * sum (sigma - ref)^2 = 2 * (0.01 + 0.01)
    CHECK(misfit(pred, meas, sigma, 2.0, 0.3) == doctest::Approx(1.25 + 2.0 * 0.02));
}

TEST_CASE("phantom painting by element centroid") {
    fem::Mesh mesh = fem::build_disk_mesh(6, 24, 1.0);
    CHECK(phantom_sigma(mesh, 0.3, {}) == std::vector<double>(mesh.element_count(), 0.3));

    std::vector<double> all = phantom_sigma(mesh, 0.3, {{0.0, 0.0, 1.0, 1.0}});
    CHECK(all == std::vector<double>(mesh.element_count(), 1.0));

    Inclusion inc{0.35, 0.0, 0.3, 1.0};
    std::vector<double> painted = phantom_sigma(mesh, 0.3, {inc});
    // Brute-force centroid containment oracle.
    int inside_oracle = 0, inside_painted = 0;
    for (std::size_t e = 0; e < mesh.element_count(); ++e) {
        auto c = mesh.centroid(e);
        bool in = std::hypot(c[0] - inc.cx, c[1] - inc.cy) <= inc.radius;
        if (in) ++inside_oracle;
        if (painted[e] == 1.0) ++inside_painted;
        CHECK(painted[e] == (in ? 1.0 : 0.3));
    }
    CHECK(inside_oracle == inside_painted);
    CHECK(inside_oracle > 0);

    CHECK_THROWS_AS(phantom_sigma(mesh, 0.3, {{5.0, 0.0, 0.1, 1.0}}), InclusionOutsideDomain);
}

TEST_CASE("inverse grid cell lookup") {
    InverseGrid grid{2, 4, 1.0};
    CHECK(grid.cell_count() == 8);
    // Distinct radii and angles land in distinct cells.
    int inner = grid.cell_of(0.2, 0.1);
    int outer = grid.cell_of(0.9, 0.1);
    CHECK(inner != outer);
    int rotated = grid.cell_of(-0.2, -0.1);
    CHECK(rotated != inner);
    CHECK(grid.cell_of(0.0, 0.0) >= 0);
    CHECK(grid.cell_of(0.99, -0.01) < 8);
}

TEST_CASE("eit problem: objective is zero at the data-generating field") {
    // Inverse-crime setup on purpose: same mesh, constant field representable
    // exactly by the inverse grid.
    Setup s = adjacent_setup(8, 4, 24);
    std::vector<double> sigma(s.mesh.element_count(), 0.3);
    std::vector<double> measured = forward_voltages(s.mesh, s.layout, s.schedule, sigma);
    EitProblem prob(s.mesh, s.layout, s.schedule, InverseGrid{2, 4, 1.0}, measured);
    CHECK(prob.dim() == 8);
    SolutionVector x(prob.dim(), std::log10(0.3));
    EvalResult r = prob.evaluate(x);
    CHECK(r.objective == doctest::Approx(0.0).epsilon(1e-18));
    // A wrong field scores worse.
    SolutionVector y(prob.dim(), std::log10(0.6));
    CHECK(prob.evaluate(y).objective > 1e-12);
}

TEST_CASE("sigma_field maps the genotype through log10 onto forward elements") {
    Setup s = adjacent_setup(8, 4, 24);
    std::vector<double> measured(s.schedule.count(), 0.0);
    EitProblem prob(s.mesh, s.layout, s.schedule, InverseGrid{2, 4, 1.0}, measured);
    SolutionVector x(prob.dim(), -1.0);
    std::vector<double> field = prob.sigma_field(x);
    REQUIRE(field.size() == s.mesh.element_count());
    for (double v : field) CHECK(v == doctest::Approx(0.1));
}

TEST_CASE("measurement CSV round trip") {
    std::vector<double> v{0.5, -1.25, 3.75e-3};
    std::string path = "eit_test_meas.csv";
    write_measurement_csv(v, path);
    std::vector<double> back = read_measurement_csv(path);
    std::remove(path.c_str());
    REQUIRE(back.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) CHECK(back[i] == doctest::Approx(v[i]).epsilon(1e-12));
}
