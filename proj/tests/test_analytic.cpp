#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"

#include "divlab/analytic.hpp"
#include "oracles.hpp"

using namespace divlab;
using namespace divlab::analytic;

namespace {

constexpr auto kWithout = RepeatMode::WithoutRepeat;
constexpr auto kWith = RepeatMode::WithRepeat;

double row_sum(const RunLengthChain& c, std::size_t r) {
    double s = 0.0;
    for (std::size_t j = 0; j < c.states(); ++j) s += c.at(r, j);
    return s;
}

}  // namespace

TEST_CASE("choose") {
    CHECK(choose(5, 2) == 10);
    CHECK(choose(17, 0) == 1);
    CHECK(choose(0, 0) == 1);
    CHECK(choose(40, 20) == oracle::pascal(40, 20));
    CHECK(to_string(choose(40, 20)) == "137846528820");
    CHECK(to_string(choose(64, 32)) == std::to_string(oracle::pascal(64, 32)));
    CHECK(to_string(choose(130, 65)) == "95067625827960698145584333020095113100");
    CHECK_THROWS_AS((choose(200, 100)), ChooseOverflow);
    CHECK_THROWS_AS((choose(2, 3)), ValidationError);
}

TEST_CASE("choose satisfies Pascal's rule") {
    for (unsigned x = 1; x <= 120; ++x) {
        for (unsigned y = 1; y < x; ++y) {
            REQUIRE(choose(x, y) == choose(x - 1, y - 1) + choose(x - 1, y));
        }
    }
}

TEST_CASE("aggregate success") {
    CHECK(p_success_aggregate(3, 2, 2, 0.5, Threshold::Strict) == 0.3);
    CHECK(p_success_aggregate(0, 5, 3, 0.5) == 0.0);
    CHECK(p_success_aggregate(5, 0, 3, 0.5) == 1.0);
    CHECK(p_success_aggregate(3, 2, 4, 0.5, Threshold::Strict) ==
          doctest::Approx(oracle::aggregate_by_enumeration(3, 2, 4, 0.5, true)).epsilon(1e-15));
    CHECK_THROWS_AS((p_success_aggregate(3, 2, 0, 0.5)), ValidationError);
    CHECK_THROWS_AS((p_success_aggregate(3, 2, 6, 0.5)), ValidationError);
    CHECK_THROWS_AS((p_success_aggregate(3, 2, 2, 0.0)), ValidationError);
    CHECK_THROWS_AS((p_success_aggregate(3, 2, 2, 1.5)), ValidationError);
    CHECK(aggregate_lower_limit(10, 0.3, Threshold::Strict) == 4);
    CHECK(aggregate_lower_limit(10, 0.3, Threshold::Inclusive) == 3);
    CHECK(aggregate_lower_limit(3, 0.5, Threshold::Inclusive) == 2);
}

TEST_CASE("aggregate success matches enumeration") {
    for (unsigned m = 0; m <= 6; ++m) {
        for (unsigned n = 0; n <= 6; ++n) {
            for (unsigned j = 1; j <= m + n; ++j) {
                for (double p : {0.1, 0.25, 0.5, 2.0 / 3.0, 0.75, 1.0}) {
                    for (bool strict : {false, true}) {
                        const double got = p_success_aggregate(m, n, j, p, strict ? Threshold::Strict : Threshold::Inclusive);
                        const double want = oracle::aggregate_by_enumeration(m, n, j, p, strict);
                        CAPTURE(m);
                        CAPTURE(n);
                        CAPTURE(j);
                        CAPTURE(p);
                        REQUIRE(got == doctest::Approx(want).epsilon(1e-13));
                    }
                }
            }
        }
    }
}

TEST_CASE("hypergeometric mass sums to one") {
    for (std::uint64_t m = 0; m <= 30; m += 3) {
        for (std::uint64_t n = 0; n <= 30; n += 4) {
            if (m + n == 0) continue;
            for (std::uint64_t j = 1; j <= m + n; ++j) {
                Count total = 0;
                for (std::uint64_t i = 0; i <= std::min(m, j); ++i) {
                    if (j - i <= n) total += choose(m, i) * choose(n, j - i);
                }
                REQUIRE(total == choose(m + n, j));
            }
        }
    }
}

TEST_CASE("transition probabilities") {
    CHECK(p_vv(MarkovParams(3, 2, kWithout)) == 0.5);
    CHECK(p_vv(MarkovParams(3, 2, kWith)) == 0.6);
    CHECK(p_ii(MarkovParams(3, 2, kWith)) == 0.4);
    MarkovParams alt(1, 1, kWithout);
    CHECK(alt.p_vv() == 0.0);
    CHECK(alt.p_ii() == 0.0);
    CHECK(MarkovParams(0, 4, kWithout).p_vv() == 0.0);
    CHECK(MarkovParams(4, 0, kWithout).p_ii() == 0.0);
    CHECK_THROWS_AS((MarkovParams(1, 0, kWithout)), ValidationError);
    CHECK_THROWS_AS((MarkovParams(0, 0, kWith)), ValidationError);
    CHECK_NOTHROW(MarkovParams(1, 0, kWith));
}

TEST_CASE("run-length chain") {
    auto c1 = run_length_chain(MarkovParams(1, 1, kWithout), 1);
    REQUIRE(c1.states() == 2);
    CHECK(c1.at(0, 0) == 0.0);
    CHECK(c1.at(0, 1) == 1.0);
    CHECK(c1.at(1, 0) == 1.0);
    CHECK(c1.at(1, 1) == 0.0);

    auto c2 = run_length_chain(MarkovParams(3, 2, kWithout), 2);
    REQUIRE(c2.states() == 3);
    CHECK(c2.at(0, 0) == 0.25);
    CHECK(c2.at(0, 1) == 0.75);
    CHECK(c2.at(1, 0) == 0.5);
    CHECK(c2.at(1, 2) == 0.5);
    CHECK(c2.at(2, 0) == 0.5);
    CHECK(c2.at(2, 2) == 0.5);

    for (std::size_t m = 0; m <= 6; ++m) {
        for (std::size_t n = 0; n <= 6; ++n) {
            if (m + n < 2) continue;
            for (auto mode : {kWith, kWithout}) {
                for (std::size_t k = 1; k <= 7; ++k) {
                    auto c = run_length_chain(MarkovParams(m, n, mode), k);
                    for (std::size_t r = 0; r < c.states(); ++r) {
                        REQUIRE(row_sum(c, r) == doctest::Approx(1.0).epsilon(1e-12));
                        for (double v : c.transition) REQUIRE((v >= 0.0 && v <= 1.0));
                    }
                }
            }
        }
    }
    CHECK_THROWS_AS((run_length_chain(MarkovParams(3, 2, kWithout), 0)), ValidationError);
}

TEST_CASE("steady state") {
    auto pi = steady_state(run_length_chain(MarkovParams(3, 2, kWithout), 2));
    CHECK(pi[0] == doctest::Approx(0.4).epsilon(1e-14));

    auto none = steady_state(run_length_chain(MarkovParams(0, 4, kWithout), 3));
    CHECK(none[0] == doctest::Approx(1.0));
    for (std::size_t r = 1; r < none.size(); ++r) CHECK(none[r] == doctest::Approx(0.0));

    auto chain = run_length_chain(MarkovParams(3, 2, kWithout), 4);
    auto solved = steady_state(chain);
    auto iterated = oracle::power_iteration(chain.transition, chain.states());
    for (std::size_t r = 0; r < chain.states(); ++r) CHECK(std::abs(solved[r] - iterated[r]) < 1e-10);

    for (std::size_t m = 1; m <= 5; ++m) {
        for (std::size_t n = 1; n <= 5; ++n) {
            for (auto mode : {kWith, kWithout}) {
                for (std::size_t k = 1; k <= 6; ++k) {
                    MarkovParams params(m, n, mode);
                    auto a = steady_state(run_length_chain(params, k));
                    auto b = steady_state_closed_form(params, k);
                    REQUIRE(std::accumulate(a.begin(), a.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
                    for (std::size_t r = 0; r <= k; ++r) REQUIRE(std::abs(a[r] - b[r]) < 1e-12);
                }
            }
        }
    }
}

TEST_CASE("expected control fraction") {
    for (std::size_t m = 0; m <= 5; ++m) {
        for (std::size_t n = 1; n <= 5; ++n) {
            if (m + n < 2) continue;
            MarkovParams params(m, n, kWithout);
            CHECK(expected_control_fraction(params, 1) == doctest::Approx(double(m) / double(m + n)));
        }
    }
    CHECK(expected_control_fraction(MarkovParams(0, 5, kWithout), 3) == 0.0);
    CHECK(expected_control_fraction(MarkovParams(3, 2, kWithout), 3) == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(std::abs(expected_control_fraction(MarkovParams(3, 2, kWithout), 3) -
                   oracle::long_run_fraction(3, 2, 3, 1'000'000, 11)) < 0.005);
    CHECK(std::abs(expected_control_fraction(MarkovParams(4, 3, kWith), 4) -
                   oracle::long_run_fraction(4, 3, 4, 1'000'000, 12, true)) < 0.005);
}

TEST_CASE("control fraction equals the steady-state long-run mass") {
    // Mass of runs that have reached K plus the lead-in of runs that will.
    for (std::size_t m = 1; m <= 5; ++m) {
        for (std::size_t n = 1; n <= 4; ++n) {
            for (std::size_t k = 1; k <= 5; ++k) {
                MarkovParams params(m, n, kWith);
                auto pi = steady_state_closed_form(params, k);
                double mass = pi[k];
                for (std::size_t r = 1; r < k; ++r) mass += pi[r] * std::pow(params.p_vv(), double(k - r));
                REQUIRE(expected_control_fraction(params, k) == doctest::Approx(mass).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("expected time to compromise") {
    CHECK(expected_time_to_compromise(MarkovParams(1, 1, kWithout), 1) == 1.5);
    CHECK(expected_time_to_compromise(MarkovParams(1, 1, kWithout), 2) == kNeverCompromised);
    CHECK(expected_time_to_compromise(MarkovParams(0, 3, kWithout), 1) == kNeverCompromised);
    CHECK(expected_time_to_compromise(MarkovParams(3, 0, kWith), 4) == 4.0);
    const double want = oracle::mean_hitting_time(3, 2, 2, 1'000'000, 5);
    const double got = expected_time_to_compromise(MarkovParams(3, 2, kWithout), 2);
    CHECK(std::abs(got - want) / want < 0.01);
}

TEST_CASE("finite window") {
    CHECK(p_success_finite_window(900, 900, 900) == 0.0);
    CHECK(p_success_finite_window(900, 1e-12, 900) == doctest::Approx(1.0));
    CHECK(p_success_finite_window(900, 300, 900) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(p_success_finite_window(900, 1000, 900) == 0.0);
    CHECK_THROWS_AS((p_success_finite_window(0, 300, 900)), ValidationError);

    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> start(0.0, 900.0);
    int fits = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) fits += start(gen) + 300.0 <= 900.0;
    CHECK(std::abs(double(fits) / n - p_success_finite_window(900, 300, 900)) < 0.005);
}
