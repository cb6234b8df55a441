#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <vector>

#include "doctest.h"
#include "physevo/constraints.hpp"
#include "physevo/rng.hpp"

using namespace physevo;

static EvalResult make(double obj, std::vector<double> hard = {}, std::vector<double> soft = {},
                       std::uint64_t idx = 0) {
    return EvalResult{obj, std::move(hard), std::move(soft), 0, idx};
}

TEST_CASE("penalized objective folds soft penalties and hard violations") {
    CHECK(penalized_objective(make(1.0), 10.0) == doctest::Approx(1.0));
    CHECK(penalized_objective(make(1.0, {}, {0.5}), 10.0) == doctest::Approx(1.5));
    CHECK(penalized_objective(make(1.0, {0.2}, {}), 10.0) == doctest::Approx(3.0));
    CHECK(penalized_objective(make(2.0, {0.1, 0.1}, {0.25}), 100.0) == doctest::Approx(22.25));
}

TEST_CASE("feasible always beats infeasible regardless of objective") {
    EvalResult feasible = make(5.0);
    EvalResult infeasible = make(1.0, {0.01});
    CHECK(lexicographic_compare(feasible, infeasible, 1e3) < 0);
    CHECK(lexicographic_compare(infeasible, feasible, 1e3) > 0);
    CHECK(prefers(feasible, infeasible));
}

TEST_CASE("infeasible solutions rank by total violation") {
    EvalResult less = make(100.0, {0.2});
    EvalResult more = make(0.0, {0.3});
    CHECK(lexicographic_compare(less, more, 1e3) < 0);
    EvalResult split = make(0.0, {0.1, 0.1});  // same total as `less`
    CHECK(lexicographic_compare(less, split, 1e3) == 0);
}

TEST_CASE("feasible solutions rank by penalized objective") {
    EvalResult low = make(1.0);
    EvalResult high = make(2.0);
    CHECK(lexicographic_compare(low, high, 1e3) < 0);
    // Soft penalties flip the order when heavy enough.
    EvalResult low_but_penalized = make(1.0, {}, {5.0});
    CHECK(lexicographic_compare(high, low_but_penalized, 1e3) < 0);
}

TEST_CASE("exact ties break by eval index (earlier wins)") {
    EvalResult early = make(1.0, {}, {}, 3);
    EvalResult late = make(1.0, {}, {}, 9);
    CHECK(lexicographic_compare(early, late, 1e3) < 0);
    CHECK(lexicographic_compare(late, early, 1e3) > 0);
    CHECK(lexicographic_compare(early, early, 1e3) == 0);
}

TEST_CASE("comparator is a total order on random triples") {
    RngStream rng(123, 0);
    const double R = 1e3;
    auto random_result = [&]() {
        std::vector<double> hard;
        if (rng.uniform01() < 0.5) hard.push_back(rng.uniform(0.0, 1.0));
        if (rng.uniform01() < 0.3) hard.push_back(0.0);
        std::vector<double> soft;
        if (rng.uniform01() < 0.5) soft.push_back(rng.uniform(0.0, 2.0));
        return EvalResult{rng.uniform(-5.0, 5.0), hard, soft, 0, rng.uniform_index(20)};
    };
    for (int trial = 0; trial < 10000; ++trial) {
        EvalResult a = random_result(), b = random_result(), c = random_result();
        int ab = lexicographic_compare(a, b, R);
        int ba = lexicographic_compare(b, a, R);
        // Antisymmetry
        CHECK(((ab < 0 && ba > 0) || (ab > 0 && ba < 0) || (ab == 0 && ba == 0)));
        // Reflexivity
        CHECK(lexicographic_compare(a, a, R) == 0);
        // Transitivity
        int bc = lexicographic_compare(b, c, R);
        int ac = lexicographic_compare(a, c, R);
        if (ab <= 0 && bc <= 0) CHECK(ac <= 0);
        if (ab < 0 && bc < 0) CHECK(ac < 0);
    }
}

TEST_CASE("repair reflect folds back across the violated bound") {
    Bounds b = Bounds::uniform(1, 0.0, 1.0);
    RngStream rng(1, 0);
    CHECK(repair_bounds({1.2}, b, BoundsPolicy::Reflect, rng)[0] == doctest::Approx(0.8));
    CHECK(repair_bounds({-0.2}, b, BoundsPolicy::Reflect, rng)[0] == doctest::Approx(0.2));
    // Multiple widths away still lands inside: -3.5 -> 0.5 on [0, 1].
    CHECK(repair_bounds({-3.5}, b, BoundsPolicy::Reflect, rng)[0] == doctest::Approx(0.5));
    CHECK(repair_bounds({0.3}, b, BoundsPolicy::Reflect, rng)[0] == doctest::Approx(0.3));
}

TEST_CASE("repair clamp saturates at the bounds") {
    Bounds b = Bounds::uniform(2, -1.0, 2.0);
    RngStream rng(1, 0);
    auto r = repair_bounds({-5.0, 7.0}, b, BoundsPolicy::Clamp, rng);
    CHECK(r[0] == doctest::Approx(-1.0));
    CHECK(r[1] == doctest::Approx(2.0));
}

TEST_CASE("repair resample lands inside the bounds and leaves valid coords alone") {
    Bounds b = Bounds::uniform(3, 0.0, 1.0);
    RngStream rng(77, 0);
    for (int i = 0; i < 200; ++i) {
        auto r = repair_bounds({-2.0, 0.4, 3.0}, b, BoundsPolicy::Resample, rng);
        CHECK(b.contains(r));
        CHECK(r[1] == doctest::Approx(0.4));
    }
}

TEST_CASE("repair is the identity on in-bounds vectors for all policies") {
    Bounds b = Bounds::uniform(4, -2.0, 2.0);
    RngStream rng(5, 0);
    SolutionVector x{-1.0, 0.0, 1.5, 2.0};
    for (auto policy : {BoundsPolicy::Clamp, BoundsPolicy::Reflect, BoundsPolicy::Resample}) {
        auto r = repair_bounds(x, b, policy, rng);
        for (std::size_t i = 0; i < x.size(); ++i) CHECK(r[i] == x[i]);
    }
}

TEST_CASE("repair output always satisfies bounds on random inputs") {
    Bounds b = Bounds::uniform(5, -1.0, 3.0);
    RngStream rng(99, 0);
    for (int trial = 0; trial < 500; ++trial) {
        SolutionVector x(5);
        for (auto& v : x) v = rng.uniform(-50.0, 50.0);
        for (auto policy : {BoundsPolicy::Clamp, BoundsPolicy::Reflect, BoundsPolicy::Resample}) {
            CHECK(b.contains(repair_bounds(x, b, policy, rng)));
        }
    }
}

TEST_CASE("violation_vector evaluates each hard constraint") {
    ConstraintSet cs;
    cs.hard.push_back([](const SolutionVector& x) { return std::max(0.0, x[0] - 1.0); });
    cs.hard.push_back([](const SolutionVector& x) { return std::max(0.0, -x[1]); });
    auto v = violation_vector(cs, {2.0, -0.5});
    REQUIRE(v.size() == 2);
    CHECK(v[0] == doctest::Approx(1.0));
    CHECK(v[1] == doctest::Approx(0.5));
}
