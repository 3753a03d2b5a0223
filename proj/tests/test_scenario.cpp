#include <cmath>

#include "doctest.h"

#include "divlab/simulator.hpp"
#include "oracles.hpp"

using namespace divlab;

namespace {

ScenarioConfig base(std::size_t platforms, std::vector<PlatformIndex> vulnerable, std::vector<double> goals,
                    std::size_t samples) {
    ScenarioConfig c;
    c.platforms = platforms;
    c.goals = std::move(goals);
    c.exploits = {ExploitSpec{std::move(vulnerable), {}, {}}};
    c.samples = samples;
    c.seed = 5150;
    return c;
}

}  // namespace

TEST_CASE("single platform follows the finite-window line") {
    std::vector<double> goals;
    for (double t = 0; t <= 900; t += 90) goals.push_back(t);
    auto points = run_scenario_study(base(1, {0}, goals, 3000));
    REQUIRE(points.size() == goals.size());
    for (const auto& p : points) {
        CAPTURE(p.goal_seconds);
        CHECK(p.samples == 3000);
        CHECK(std::abs(p.success_fraction - (900.0 - p.goal_seconds) / 900.0) < 0.035);
    }
    CHECK(points.front().success_fraction == 1.0);
    CHECK(points.back().success_fraction == 0.0);
}

TEST_CASE("goals beyond the duration never succeed") {
    for (std::size_t n : {1u, 3u, 5u}) {
        std::vector<PlatformIndex> all;
        for (std::size_t i = 0; i < n; ++i) all.push_back(i);
        auto points = run_scenario_study(base(n, all, {901.0, 1000.0}, 300));
        for (const auto& p : points) CHECK(p.successes == 0);
    }
}

TEST_CASE("one vulnerable platform of three matches the renewal oracle") {
    for (double goal : {5.0, 15.0, 26.25}) {
        CAPTURE(goal);
        auto points = run_scenario_study(base(3, {1}, {goal}, 4000));
        const double want = oracle::single_vulnerable_success(3, goal, 900, 20, 30);
        CHECK(std::abs(points[0].success_fraction - want) < 0.03);
    }
    // A single dwell never lasts longer than the maximum delay.
    auto beyond = run_scenario_study(base(3, {1}, {30.5, 60.0, 75.0}, 1000));
    for (const auto& p : beyond) CHECK(p.successes == 0);
}

TEST_CASE("every platform vulnerable behaves like one platform") {
    auto points = run_scenario_study(base(3, {0, 1, 2}, {26.25, 100.0, 450.0}, 3000));
    for (const auto& p : points) CHECK(std::abs(p.success_fraction - (900.0 - p.goal_seconds) / 900.0) < 0.035);
}

TEST_CASE("success is monotone in the goal and in the vulnerable set") {
    std::vector<double> goals;
    for (double t = 0; t <= 300; t += 5) goals.push_back(t);
    auto one = run_scenario_study(base(3, {0}, goals, 1000));
    auto two = run_scenario_study(base(3, {0, 1}, goals, 1000));
    auto all = run_scenario_study(base(3, {0, 1, 2}, goals, 1000));
    for (std::size_t i = 0; i < goals.size(); ++i) {
        if (i > 0) {
            CHECK(one[i].successes <= one[i - 1].successes);
            CHECK(two[i].successes <= two[i - 1].successes);
            CHECK(all[i].successes <= all[i - 1].successes);
        }
        // Same seed and sample index give the same migration path in all three.
        CHECK(one[i].successes <= two[i].successes);
        CHECK(two[i].successes <= all[i].successes);
    }
}

TEST_CASE("crossing a migration period gives a significant drop") {
    auto c = base(3, {1}, {20.0, 30.0}, 1000);
    auto points = run_scenario_study(c);
    const double p1 = points[0].success_fraction;
    const double p2 = points[1].success_fraction;
    const double pooled = 0.5 * (p1 + p2);
    const double se = std::sqrt(pooled * (1 - pooled) * 2.0 / 1000.0);
    CHECK((p1 - p2) / se > 3.29);
    CHECK(p1 - p2 > 10.0 / 900.0);
}

TEST_CASE("per-sample exploit models") {
    auto c = base(3, {0}, {10.0}, 50);
    std::vector<std::vector<ExploitSpec>> models(50, c.exploits);
    auto a = run_scenario_study(c);
    auto b = run_scenario_study(c, models);
    CHECK(a[0].successes == b[0].successes);
    models.pop_back();
    CHECK_THROWS_AS((run_scenario_study(c, models)), ValidationError);

    // No exploits at all: nothing to win.
    std::vector<std::vector<ExploitSpec>> empty(50);
    CHECK(run_scenario_study(c, empty)[0].successes == 0);
}

TEST_CASE("fixed arrival windows") {
    auto c = base(1, {0}, {0.0, 100.0, 101.0}, 200);
    c.exploits[0].arrival_lo = 800.0;
    c.exploits[0].arrival_hi = 800.0;
    auto points = run_scenario_study(c);
    CHECK(points[0].success_fraction == 1.0);
    CHECK(points[1].success_fraction == 1.0);
    CHECK(points[2].success_fraction == 0.0);
}

TEST_CASE("scenario validation") {
    auto c = base(3, {0}, {10.0}, 10);
    c.platforms = 0;
    CHECK_THROWS_AS(run_scenario_study(c), ValidationError);
    c = base(3, {5}, {10.0}, 10);
    CHECK_THROWS_AS(run_scenario_study(c), ValidationError);
    c = base(3, {0}, {}, 10);
    CHECK_THROWS_AS(run_scenario_study(c), ValidationError);
    c = base(3, {0}, {-1.0}, 10);
    CHECK_THROWS_AS(run_scenario_study(c), ValidationError);
    c = base(3, {0}, {10.0}, 10);
    c.delay_lo = 40;
    CHECK_THROWS_AS(run_scenario_study(c), ValidationError);
    c = base(3, {0}, {10.0}, 0);
    CHECK_THROWS_AS(run_scenario_study(c), ValidationError);
    c = base(3, {0}, {10.0}, 10);
    c.duration = 0;
    CHECK_THROWS_AS(run_scenario_study(c), ValidationError);
}

TEST_CASE("scenario runs are reproducible") {
    auto c = base(4, {0, 2}, {10.0, 40.0, 80.0}, 300);
    auto a = run_scenario_study(c);
    auto b = run_scenario_study(c);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].successes == b[i].successes);
}
