#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdio>
#include <vector>

#include "doctest.h"
#include "physevo/scara.hpp"

using namespace physevo;
using namespace physevo::scara;

namespace {

std::vector<double> sample_times(int n, double tf) {
    std::vector<double> t(n);
    for (int i = 0; i < n; ++i) t[i] = (i + 1) * tf / n;
    return t;
}

}  // namespace

TEST_CASE("zero state and zero drive is an equilibrium") {
    PhysParams phys = default_phys_params(2.0);
    phys.voltage_axis1.assign(phys.voltage_axis1.size(), 0.0);
    phys.voltage_axis2.assign(phys.voltage_axis2.size(), 0.0);
    std::vector<double> x(kStateDim, 0.0), dx(kStateDim, 1.0);
    physical_rhs(phys, 0.5, x, dx);
    for (double v : dx) CHECK(v == doctest::Approx(0.0));
}

TEST_CASE("torque balance: unit current accelerates by motor_constant/inertia") {
    PhysParams phys = default_phys_params(2.0);
    phys.voltage_axis1.assign(phys.voltage_axis1.size(), 0.0);
    phys.voltage_axis2.assign(phys.voltage_axis2.size(), 0.0);
    std::vector<double> x(kStateDim, 0.0), dx(kStateDim, 0.0);
    x[0] = 1.0;  // i1 = 1 A
    physical_rhs(phys, 0.0, x, dx);
    CHECK(dx[2] == doctest::Approx(phys.axis1.motor_constant / phys.axis1.inertia));
    CHECK(dx[4] == doctest::Approx(0.0));  // axis 2 untouched
    CHECK(dx[5] == doctest::Approx(0.0));
}

TEST_CASE("ann parameter count matches the layer layout") {
    CHECK(AnnParams::parameter_count(8) == 158);
    CHECK(AnnParams::parameter_count(1) == 12 + 1 + 6 + 6);
}

TEST_CASE("zero-weight net is the identity on the physical derivative") {
    AnnParams ann;
    ann.hidden = 4;
    ann.theta.assign(AnnParams::parameter_count(4), 0.0);
    std::vector<double> state{0.1, 0.2, 0.3, -0.1, -0.2, -0.3};
    std::vector<double> phys_dx{1.0, 2.0, 3.0, 4.0, 5.0, 6.0};
    std::vector<double> out(kStateDim, 0.0);
    ann_forward(ann, state, phys_dx, out);
    for (int i = 0; i < kStateDim; ++i) CHECK(out[i] == phys_dx[i]);
}

TEST_CASE("with zero hidden activations only the output bias is added") {
    AnnParams ann;
    ann.hidden = 2;
    ann.theta.assign(AnnParams::parameter_count(2), 0.0);
    // Layout: W1 (H x 12), b1 (H), W2 (6 x H), b2 (6); set b2 = (1..6).
    std::size_t b2_offset = ann.theta.size() - 6;
    for (int i = 0; i < 6; ++i) ann.theta[b2_offset + i] = i + 1.0;
    std::vector<double> state(kStateDim, 0.0), phys_dx(kStateDim, 0.5), out(kStateDim, 0.0);
    ann_forward(ann, state, phys_dx, out);
    for (int i = 0; i < kStateDim; ++i) CHECK(out[i] == doctest::Approx(0.5 + i + 1.0));
}

TEST_CASE("zero-weight hybrid simulation equals the physical simulation") {
    PhysParams phys = default_phys_params(2.0);
    AnnParams ann;
    ann.hidden = 8;
    ann.theta.assign(AnnParams::parameter_count(8), 0.0);
    std::vector<double> x0(kStateDim, 0.0);
    auto times = sample_times(20, 2.0);
    Trajectory a = simulate_physical(phys, x0, 0.0, 2.0, times);
    Trajectory b = simulate_hybrid(x0, phys, ann, 0.0, 2.0, times);
    REQUIRE(a.states.size() == b.states.size());
    for (std::size_t i = 0; i < a.states.size(); ++i)
        for (int j = 0; j < kStateDim; ++j) CHECK(a.states[i][j] == b.states[i][j]);
}

TEST_CASE("physical simulation agrees with an independent Euler oracle") {
    PhysParams phys = default_phys_params(1.0);
    std::vector<double> x0(kStateDim, 0.0);
    auto times = sample_times(10, 1.0);
    Trajectory rk = simulate_physical(phys, x0, 0.0, 1.0, times);

    // Forward Euler at a much finer step, written out independently.
    std::vector<double> x = x0, dx(kStateDim, 0.0);
    const int n_steps = 100000;
    const double h = 1.0 / n_steps;
    std::size_t next_sample = 0;
    std::vector<std::vector<double>> euler_states;
    for (int s = 0; s < n_steps; ++s) {
        physical_rhs(phys, s * h, x, dx);
        for (int j = 0; j < kStateDim; ++j) x[j] += h * dx[j];
        double t = (s + 1) * h;
        while (next_sample < times.size() && times[next_sample] <= t + 1e-12) {
            euler_states.push_back(x);
            ++next_sample;
        }
    }
    REQUIRE(euler_states.size() == times.size());
    for (std::size_t i = 0; i < times.size(); ++i)
        for (int j = 0; j < kStateDim; ++j)
            CHECK(std::abs(rk.states[i][j] - euler_states[i][j]) < 1e-3);
}

TEST_CASE("trajectory loss arithmetic") {
    MeasuredData data;
    data.times = {0.5, 1.0, 1.5};
    data.angles = {{0.1, 0.2}, {0.3, 0.4}, {0.5, 0.6}};
    Trajectory traj;
    traj.times = data.times;
    for (const auto& a : data.angles) {
        std::vector<double> s(kStateDim, 0.0);
        s[1] = a[0];
        s[4] = a[1];
        traj.states.push_back(s);
    }
    CHECK(trajectory_loss(traj, data) == doctest::Approx(0.0));
    // Constant offset delta on alpha1: loss = delta^2.
    const double delta = 0.05;
    for (auto& s : traj.states) s[1] += delta;
    CHECK(trajectory_loss(traj, data) == doctest::Approx(delta * delta));
}

TEST_CASE("frictionless generator reproduces the physical simulation") {
    PhysParams phys = default_phys_params(2.0);
    std::vector<double> x0(kStateDim, 0.0);
    auto times = sample_times(25, 2.0);
    RngStream rng(0, 0);
    MeasuredData data = synthesize_measurements(phys, FrictionParams{}, x0, times, 0.0, rng);
    Trajectory traj = simulate_physical(phys, x0, 0.0, 2.0, times);
    for (std::size_t i = 0; i < times.size(); ++i) {
        CHECK(data.angles[i][0] == doctest::Approx(traj.states[i][1]).epsilon(1e-12));
        CHECK(data.angles[i][1] == doctest::Approx(traj.states[i][4]).epsilon(1e-12));
    }
}

TEST_CASE("stick-slip friction reduces the achieved angles") {
    PhysParams phys = default_phys_params(2.0);
    std::vector<double> x0(kStateDim, 0.0);
    auto times = sample_times(25, 2.0);
    RngStream rng(0, 0);
    MeasuredData frictionless = synthesize_measurements(phys, FrictionParams{}, x0, times, 0.0, rng);
    MeasuredData with_friction =
        synthesize_measurements(phys, FrictionParams{0.3, 0.1, 0.05}, x0, times, 0.0, rng);
    // Compare at the final time where the lag accumulates.
    std::size_t last = times.size() - 1;
    CHECK(std::abs(with_friction.angles[last][0]) < std::abs(frictionless.angles[last][0]));
    CHECK(std::abs(with_friction.angles[last][1]) < std::abs(frictionless.angles[last][1]));
}

TEST_CASE("noisy data generation is reproducible under a fixed seed") {
    PhysParams phys = default_phys_params(1.0);
    std::vector<double> x0(kStateDim, 0.0);
    auto times = sample_times(10, 1.0);
    RngStream r1(7, 0), r2(7, 0);
    MeasuredData a = synthesize_measurements(phys, FrictionParams{0.3, 0.1, 0.05}, x0, times, 0.01, r1);
    MeasuredData b = synthesize_measurements(phys, FrictionParams{0.3, 0.1, 0.05}, x0, times, 0.01, r2);
    for (std::size_t i = 0; i < times.size(); ++i) {
        CHECK(a.angles[i][0] == b.angles[i][0]);
        CHECK(a.angles[i][1] == b.angles[i][1]);
    }
}

TEST_CASE("zero-weight objective equals the baseline loss") {
    ScaraProblem prob = default_problem(8);
    CHECK(prob.dim() == 158);
    SolutionVector zeros(prob.dim(), 0.0);
    EvalResult r = prob.evaluate(zeros);
    CHECK(r.objective == doctest::Approx(prob.baseline_loss()));
    CHECK(r.feasible());
    CHECK(r.objective > 0.0);  // stick-slip data differs from the physical model
}

TEST_CASE("pathological weights hit the penalty cap instead of NaN") {
    ScaraProblem prob = default_problem(2);
    SolutionVector huge(prob.dim(), 5.0);  // saturated net pushing hard
    EvalResult r = prob.evaluate(huge);
    CHECK(std::isfinite(r.objective));
    CHECK(r.objective <= ScaraProblem::kPenaltyCap);
}

TEST_CASE("measured data CSV round trip") {
    MeasuredData data;
    data.times = {0.1, 0.2, 0.3};
    data.angles = {{0.11, -0.2}, {0.33, 0.0}, {-0.5, 1.25}};
    std::string path = "scara_test_roundtrip.csv";
    write_csv(data, path);
    MeasuredData back = read_csv(path);
    std::remove(path.c_str());
    REQUIRE(back.times.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(back.times[i] == doctest::Approx(data.times[i]));
        CHECK(back.angles[i][0] == doctest::Approx(data.angles[i][0]));
        CHECK(back.angles[i][1] == doctest::Approx(data.angles[i][1]));
    }
}
