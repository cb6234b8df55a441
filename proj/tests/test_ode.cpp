#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "physevo/errors.hpp"
#include "physevo/ode.hpp"

using namespace physevo;

TEST_CASE("zero rhs yields a constant trajectory") {
    OdeRhs rhs = [](double, const std::vector<double>&, std::vector<double>& dx) {
        dx.assign(2, 0.0);
    };
    auto traj = integrate_fixed_rk4(rhs, {3.0, -1.5}, 0.0, 1.0, 10, {0.0, 0.37, 1.0});
    REQUIRE(traj.states.size() == 3);
    for (const auto& s : traj.states) {
        CHECK(s[0] == doctest::Approx(3.0));
        CHECK(s[1] == doctest::Approx(-1.5));
    }
}

TEST_CASE("exponential decay matches e^{-1} to 1e-9") {
    OdeRhs rhs = [](double, const std::vector<double>& x, std::vector<double>& dx) {
        dx = {-x[0]};
    };
    auto traj = integrate_fixed_rk4(rhs, {1.0}, 0.0, 1.0, 1000, {1.0});
    CHECK(std::abs(traj.states[0][0] - std::exp(-1.0)) < 1e-9);
}

TEST_CASE("observed convergence order is 4 within 0.3") {
    // Richardson estimate on a smooth nonlinear problem: dx/dt = x*cos(t).
    OdeRhs rhs = [](double t, const std::vector<double>& x, std::vector<double>& dx) {
        dx = {x[0] * std::cos(t)};
    };
    auto endpoint = [&](int steps) {
        return integrate_fixed_rk4(rhs, {1.0}, 0.0, 2.0, steps, {2.0}).states[0][0];
    };
    double exact = std::exp(std::sin(2.0));
    double e1 = std::abs(endpoint(40) - exact);
    double e2 = std::abs(endpoint(80) - exact);
    double order = std::log2(e1 / e2);
    CHECK(order == doctest::Approx(4.0).epsilon(0.3 / 4.0));
}

TEST_CASE("linearity: doubling x0 doubles a linear trajectory") {
    OdeRhs rhs = [](double, const std::vector<double>& x, std::vector<double>& dx) {
        dx = {-0.7 * x[0] + 0.1 * x[1], 0.2 * x[0] - 0.3 * x[1]};
    };
    std::vector<double> samples{0.5, 1.0, 1.7};
    auto a = integrate_fixed_rk4(rhs, {1.0, 2.0}, 0.0, 2.0, 200, samples);
    auto b = integrate_fixed_rk4(rhs, {2.0, 4.0}, 0.0, 2.0, 200, samples);
    for (std::size_t i = 0; i < samples.size(); ++i)
        for (int j = 0; j < 2; ++j)
            CHECK(b.states[i][j] == doctest::Approx(2.0 * a.states[i][j]).epsilon(1e-10));
}

TEST_CASE("sample times are honored and interpolated between grid points") {
    OdeRhs rhs = [](double, const std::vector<double>& x, std::vector<double>& dx) {
        dx = {-x[0]};
    };
    // Deliberately off-grid sample times with a coarse grid.
    std::vector<double> samples{0.123, 0.5, 0.987};
    auto traj = integrate_fixed_rk4(rhs, {1.0}, 0.0, 1.0, 2000, samples);
    REQUIRE(traj.times.size() == 3);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        CHECK(traj.times[i] == doctest::Approx(samples[i]));
        CHECK(traj.states[i][0] == doctest::Approx(std::exp(-samples[i])).epsilon(1e-6));
    }
}

TEST_CASE("blow-up raises NonFiniteState with the offending time") {
    // dx/dt = x^2 with x0 = 1 blows up at t = 1.
    OdeRhs rhs = [](double, const std::vector<double>& x, std::vector<double>& dx) {
        dx = {x[0] * x[0]};
    };
    try {
        integrate_fixed_rk4(rhs, {1.0}, 0.0, 2.0, 100, {2.0});
        FAIL("expected NonFiniteState");
    } catch (const NonFiniteState& e) {
        CHECK(e.time > 0.0);
        CHECK(e.time <= 2.0);
    }
}

TEST_CASE("doubling the step count changes samples by less than 1e-6") {
    OdeRhs rhs = [](double t, const std::vector<double>& x, std::vector<double>& dx) {
        dx = {std::sin(t) - 0.5 * x[0]};
    };
    std::vector<double> samples{0.25, 1.0, 1.75};
    auto coarse = integrate_fixed_rk4(rhs, {0.3}, 0.0, 2.0, 400, samples);
    auto fine = integrate_fixed_rk4(rhs, {0.3}, 0.0, 2.0, 800, samples);
    for (std::size_t i = 0; i < samples.size(); ++i)
        CHECK(std::abs(coarse.states[i][0] - fine.states[i][0]) < 1e-6);
}
