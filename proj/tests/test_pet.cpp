#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdio>
#include <vector>

#include "doctest.h"
#include "physevo/ode.hpp"
#include "physevo/pet.hpp"

using namespace physevo;
using namespace physevo::pet;

namespace {

InputFunction test_input() { return gamma_variate_input(100.0, 1.5, 40.0); }

// Independent oracle: integrate the compartment ODEs with RK4, then average
// C_meas over each frame on a fine uniform grid.
VoxelTac rk4_oracle(const Microparams& p, const InputFunction& A, const FrameSchedule& sched) {
    OdeRhs rhs = [&](double t, const std::vector<double>& c, std::vector<double>& dc) {
        const double a = A.at(t);
        dc = {p.K1 * a - (p.k2 + p.k3) * c[0], p.k3 * c[0]};
    };
    const double t_end = sched.frames.back().second;
    const int m = 200;  // Simpson subintervals per frame (even)
    std::vector<double> samples;
    for (const auto& [start, end] : sched.frames)
        for (int i = 0; i <= m; ++i) samples.push_back(start + (end - start) * i / m);
    Trajectory traj = integrate_fixed_rk4(rhs, {0.0, 0.0}, 0.0, t_end, 200000, samples);
    auto cmeas_at = [&](std::size_t i) {
        double c1 = traj.states[i][0], c2 = traj.states[i][1];
        return (1.0 - p.VB) * (c1 + c2) + p.VB * A.at(samples[i]);
    };
    VoxelTac out;
    for (std::size_t f = 0; f < sched.frames.size(); ++f) {
        std::size_t base = f * (m + 1);
        double sum = cmeas_at(base) + cmeas_at(base + m);
        for (int i = 1; i < m; ++i) sum += (i % 2 ? 4.0 : 2.0) * cmeas_at(base + i);
        out.push_back(sum / (3.0 * m));  // Simpson average: (h/3) sum / duration
    }
    return out;
}

}  // namespace

TEST_CASE("gamma-variate input is positive and piecewise linear") {
    InputFunction A = test_input();
    A.validate();
    CHECK(A.at(0.0) == doctest::Approx(0.0));
    CHECK(A.at(1.5) > 0.0);
    // Linear interpolation between samples.
    for (std::size_t i = 0; i + 1 < A.times.size(); ++i) {
        double mid = 0.5 * (A.times[i] + A.times[i + 1]);
        CHECK(A.at(mid) == doctest::Approx(0.5 * (A.activities[i] + A.activities[i + 1])));
    }
}

TEST_CASE("frame schedule is contiguous and increasing") {
    FrameSchedule s = default_schedule();
    s.validate();
    CHECK(s.count() >= 20);
    for (std::size_t i = 0; i + 1 < s.frames.size(); ++i) {
        CHECK(s.frames[i].second == doctest::Approx(s.frames[i + 1].first));
        CHECK(s.frames[i].second > s.frames[i].first);
    }
    // Short frames first.
    double first_len = s.frames.front().second - s.frames.front().first;
    double last_len = s.frames.back().second - s.frames.back().first;
    CHECK(first_len < last_len);
}

TEST_CASE("zero input gives a zero TAC") {
    InputFunction A;
    A.times = {0.0, 10.0, 40.0};
    A.activities = {0.0, 0.0, 0.0};
    Microparams p{0.5, 0.3, 0.15, 0.0, 0.05};
    VoxelTac tac = model_tac(p, A, default_schedule());
    for (double v : tac) CHECK(v == doctest::Approx(0.0));
}

TEST_CASE("zero inflow and zero blood fraction gives a zero TAC") {
    Microparams p{0.0, 0.3, 0.15, 0.0, 0.0};
    VoxelTac tac = model_tac(p, test_input(), default_schedule());
    for (double v : tac) CHECK(v == doctest::Approx(0.0));
}

TEST_CASE("analytic TAC matches the RK4 oracle to 1e-6 relative") {
    Microparams p{0.1, 0.2, 0.05, 0.0, 0.05};
    FrameSchedule sched = default_schedule();
    InputFunction A = test_input();
    VoxelTac analytic = model_tac(p, A, sched);
    VoxelTac oracle = rk4_oracle(p, A, sched);
    double peak = 0.0;
    for (double v : oracle) peak = std::max(peak, std::abs(v));
    REQUIRE(analytic.size() == oracle.size());
    for (std::size_t i = 0; i < analytic.size(); ++i)
        CHECK(std::abs(analytic[i] - oracle[i]) <= 1e-6 * peak);
}

TEST_CASE("k3 = 0 reduces the 2C model to the 1C model") {
    // With k3 = 0 the second compartment never fills, so the TAC must equal
    // the single-compartment solution dc/dt = K1 A - k2 c.
    InputFunction A = test_input();
    FrameSchedule sched = default_schedule();
    Microparams p{0.4, 0.25, 0.0, 0.0, 0.1};
    VoxelTac two_c = model_tac(p, A, sched);
    VoxelTac one_c = rk4_oracle(p, A, sched);  // second compartment stays 0 when k3 = 0
    double peak = 0.0;
    for (double v : one_c) peak = std::max(peak, std::abs(v));
    for (std::size_t i = 0; i < two_c.size(); ++i)
        CHECK(std::abs(two_c[i] - one_c[i]) <= 1e-6 * peak);
}

TEST_CASE("noiseless model TAC is non-negative") {
    Microparams p{0.8, 0.05, 0.4, 0.0, 0.3};
    VoxelTac tac = model_tac(p, test_input(), default_schedule());
    for (double v : tac) CHECK(v >= 0.0);
}

TEST_CASE("objective vanishes on self-generated data and scales quadratically") {
    InputFunction A = test_input();
    FrameSchedule sched = default_schedule();
    Microparams p{0.5, 0.3, 0.15, 0.0, 0.05};
    VoxelTac measured = model_tac(p, A, sched);
    CHECK(objective(p, A, sched, measured) == doctest::Approx(0.0).epsilon(1e-12));

    // Shift the data: doubling all residuals quadruples the loss.
    VoxelTac shifted = measured, shifted2 = measured;
    for (auto& v : shifted) v += 1.0;
    for (auto& v : shifted2) v += 2.0;
    double l1 = objective(p, A, sched, shifted);
    double l2 = objective(p, A, sched, shifted2);
    CHECK(l2 == doctest::Approx(4.0 * l1).epsilon(1e-9));
}

TEST_CASE("regularization with zero weight changes nothing") {
    InputFunction A = test_input();
    FrameSchedule sched = default_schedule();
    Microparams p{0.5, 0.3, 0.15, 0.0, 0.05};
    VoxelTac measured = model_tac(Microparams{0.4, 0.2, 0.1, 0.0, 0.03}, A, sched);
    ObjectiveOptions off{};
    ObjectiveOptions zero{true, 0.0};
    CHECK(objective(p, A, sched, measured, off) == objective(p, A, sched, measured, zero));
    ObjectiveOptions on{true, 10.0};
    CHECK(objective(p, A, sched, measured, on) >= objective(p, A, sched, measured, off));
}

TEST_CASE("microparams validation") {
    CHECK_THROWS_AS((Microparams{0.5, 0.3, 0.1, 0.2, 0.05}).validate(), InvalidParams);  // k4 != 0
    CHECK_THROWS_AS((Microparams{-0.1, 0.3, 0.1, 0.0, 0.05}).validate(), InvalidParams);
    CHECK_THROWS_AS((Microparams{0.5, 0.3, 0.1, 0.0, 1.5}).validate(), InvalidParams);
    CHECK_NOTHROW((Microparams{0.5, 0.3, 0.1, 0.0, 0.05}).validate());
}

TEST_CASE("noise model: sigma0 = 0 reproduces the noiseless TAC, fixed seeds reproduce") {
    InputFunction A = test_input();
    FrameSchedule sched = default_schedule();
    Microparams p{0.5, 0.3, 0.15, 0.0, 0.05};
    RngStream r0(3, 0);
    VoxelTac clean = synthesize_frames(p, A, sched, 0.0, r0);
    VoxelTac reference = model_tac(p, A, sched);
    for (std::size_t i = 0; i < clean.size(); ++i) CHECK(clean[i] == reference[i]);

    RngStream r1(3, 0), r2(3, 0);
    VoxelTac n1 = synthesize_frames(p, A, sched, 5.0, r1);
    VoxelTac n2 = synthesize_frames(p, A, sched, 5.0, r2);
    for (std::size_t i = 0; i < n1.size(); ++i) CHECK(n1[i] == n2[i]);
}

TEST_CASE("local perturbation of any parameter raises the noiseless objective") {
    InputFunction A = test_input();
    FrameSchedule sched = default_schedule();
    Microparams truth{0.5, 0.3, 0.15, 0.0, 0.05};
    VoxelTac measured = model_tac(truth, A, sched);
    double base = objective(truth, A, sched, measured);
    auto perturbed = [&](int coord, double factor) {
        Microparams q = truth;
        double* fields[] = {&q.K1, &q.k2, &q.k3, &q.VB};
        *fields[coord] *= factor;
        return objective(q, A, sched, measured);
    };
    for (int coord = 0; coord < 4; ++coord) {
        CHECK(perturbed(coord, 1.1) > base);
        CHECK(perturbed(coord, 0.9) > base);
    }
}

TEST_CASE("pet problem evaluation decodes the genotype") {
    InputFunction A = test_input();
    FrameSchedule sched = default_schedule();
    Microparams truth{0.5, 0.3, 0.15, 0.0, 0.05};
    VoxelTac measured = model_tac(truth, A, sched);
    PetProblem prob(A, sched, measured);
    CHECK(prob.dim() == 4);
    EvalResult at_truth = prob.evaluate({0.5, 0.3, 0.15, 0.05});
    CHECK(at_truth.objective == doctest::Approx(0.0).epsilon(1e-12));
    EvalResult off = prob.evaluate({0.6, 0.3, 0.15, 0.05});
    CHECK(off.objective > at_truth.objective);
}

TEST_CASE("voxel batch and fit CSV round trips") {
    VoxelBatch batch;
    batch.ids = {1, 5};
    batch.tacs = {{0.5, 1.25, 2.0}, {0.0, -1.0, 3.5}};
    std::string path = "pet_test_voxels.csv";
    write_voxel_csv(batch, path);
    VoxelBatch back = read_voxel_csv(path);
    std::remove(path.c_str());
    REQUIRE(back.ids.size() == 2);
    CHECK(back.ids == batch.ids);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            CHECK(back.tacs[i][j] == doctest::Approx(batch.tacs[i][j]));
}
