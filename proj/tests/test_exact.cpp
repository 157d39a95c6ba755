#include <doctest.h>

#include <cmath>
#include <vector>

#include "fixtures.hpp"
#include "sinai/error.hpp"
#include "sinai/exact.hpp"
#include "sinai/oracle.hpp"
#include "sinai/rng.hpp"
#include "sinai/valleys.hpp"

using namespace sinai;
using namespace sinai::exact;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// The printed general-x exit time display, evaluated naively:
// T(a+1)(1 + sum_{j=a+1}^{x-1} F(j,a)) - sum_{l=a+1}^{x-1} sum_{j=l}^{x-1} F(j,l)/alpha_l.
double exit_time_display(const Potential& pot, const Environment& env, Index a, Index x, Index b) {
    auto F = [&](Index j, Index l) { return std::exp(pot(j) - pot(l)); };
    double num = 0.0;
    for (Index l = a + 1; l <= b - 1; ++l) {
        for (Index j = l; j <= b - 1; ++j) num += F(j, l) / env.alpha(l);
    }
    double den = 1.0;
    for (Index j = a + 1; j <= b - 1; ++j) den += F(j, a);
    const double t1 = num / den;
    double lead = 1.0;
    for (Index j = a + 1; j <= x - 1; ++j) lead += F(j, a);
    double sub = 0.0;
    for (Index l = a + 1; l <= x - 1; ++l) {
        for (Index j = l; j <= x - 1; ++j) sub += F(j, l) / env.alpha(l);
    }
    return t1 * lead - sub;
}

}  // namespace

TEST_CASE("flat ruin probabilities") {
    const auto pot = build_potential(fixtures::flat(-10, 10));
    const auto r = ruin_probabilities(pot, {0, 2, 5});
    CHECK(r.p_b_before_a == doctest::Approx(2.0 / 5.0).epsilon(1e-15));
    CHECK(r.p_a_before_b == doctest::Approx(3.0 / 5.0).epsilon(1e-15));
}

TEST_CASE("constant drift ruin probability") {
    const auto env = fixtures::constant_env(-5, 5, 0.75);
    const auto pot = build_potential(env);
    const auto r = ruin_probabilities(pot, {0, 1, 3});
    CHECK(r.p_b_before_a == doctest::Approx(9.0 / 13.0).epsilon(1e-14));
    const auto table = oracle::solve_ruin(env, 0, 3);
    CHECK(rel(r.p_b_before_a, table.b_first(1)) < 1e-13);
}

TEST_CASE("ruin probabilities are complementary") {
    for (Seed seed = 1; seed <= 30; ++seed) {
        const auto env = sample_environment(UniformSymmetric{0.05}, -40, 40, seed);
        const auto pot = build_potential(env);
        for (Index a = -40; a <= 37; a += 3) {
            for (Index b = a + 2; b <= 40; b += 5) {
                for (Index x = a + 1; x < b; ++x) {
                    const auto r = ruin_probabilities(pot, {a, x, b});
                    REQUIRE(std::abs(r.p_a_before_b + r.p_b_before_a - 1.0) <= 1e-12);
                    REQUIRE(r.p_a_before_b >= 0.0);
                    REQUIRE(r.p_b_before_a >= 0.0);
                }
            }
        }
    }
}

TEST_CASE("degenerate queries are rejected") {
    const auto env = fixtures::flat(-5, 5);
    const auto pot = build_potential(env);
    CHECK_THROWS_AS(ruin_probabilities(pot, {0, 0, 3}), Error);
    CHECK_THROWS_AS(ruin_probabilities(pot, {0, 3, 3}), Error);
    CHECK_THROWS_AS(ruin_probabilities(pot, {-6, 0, 3}), Error);
    CHECK_THROWS_AS(expected_local_time(pot, env, 1, 1), Error);
}

TEST_CASE("flat exit times") {
    const auto env = fixtures::flat(-10, 10);
    const auto pot = build_potential(env);
    CHECK(expected_exit_time(pot, env, {0, 2, 4}) == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(expected_exit_time(pot, env, {0, 1, 3}) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(exit_time_from_neighbor(pot, env, 0, 3) == doctest::Approx(2.0).epsilon(1e-14));
    for (Index a = -10; a < 0; ++a) {
        for (Index b = a + 2; b <= 10; ++b) {
            for (Index x = a + 1; x < b; ++x) {
                REQUIRE(expected_exit_time(pot, env, {a, x, b}) ==
                        doctest::Approx(static_cast<double>((x - a) * (b - x))).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("exit time matches the linear-system oracle on random environments") {
    Stream pick(77);
    for (Seed seed = 1; seed <= 10; ++seed) {
        const auto env = sample_environment(TwoPointSymmetric{0.25}, -15, 15, seed);
        const auto pot = build_potential(env);
        for (int q = 0; q < 50; ++q) {
            const Index a = -15 + static_cast<Index>(pick.below(28));
            const Index b = a + 2 + static_cast<Index>(pick.below(static_cast<std::uint64_t>(15 - a - 1)));
            const Index x = a + 1 + static_cast<Index>(pick.below(static_cast<std::uint64_t>(b - a - 1)));
            const auto table = oracle::solve_expected_exit(env, a, b);
            REQUIRE(rel(expected_exit_time(pot, env, {a, x, b}), table.at(x)) < 1e-9);
        }
    }
}

TEST_CASE("exit time under a peak near the left end") {
    // Rises 5 steps from 0, then falls 55: the scale sums near b are tiny
    // next to the total.
    std::vector<int> steps;
    for (int k = 0; k <= 5; ++k) steps.push_back(k);
    for (int k = 4; k >= -50; --k) steps.push_back(k);
    const auto env = fixtures::staircase_env(0, steps);
    const auto pot = build_potential(env);
    const Index b = static_cast<Index>(steps.size()) - 1;
    const auto table = oracle::solve_expected_exit(env, 0, b);
    for (Index x = 1; x < b; ++x) {
        CHECK(rel(expected_exit_time(pot, env, {0, x, b}), table.at(x)) < 1e-9);
    }
}

TEST_CASE("one-step exit formula agrees with the general evaluation and the display") {
    for (Seed seed = 1; seed <= 20; ++seed) {
        const auto env = sample_environment(TwoPointSymmetric{0.25}, -12, 12, seed);
        const auto pot = build_potential(env);
        for (Index a = -12; a <= 10; ++a) {
            for (Index b = a + 2; b <= std::min<Index>(a + 12, 12); ++b) {
                const double t1 = exit_time_from_neighbor(pot, env, a, b);
                REQUIRE(rel(t1, expected_exit_time(pot, env, {a, a + 1, b})) < 1e-11);
                const auto table = oracle::solve_expected_exit(env, a, b);
                for (Index x = a + 1; x < b; ++x) {
                    // Moderate intervals keep the display's subtraction well conditioned.
                    REQUIRE(rel(exit_time_display(pot, env, a, x, b), table.at(x)) < 1e-8);
                }
            }
        }
    }
}

TEST_CASE("geometric parameter") {
    const auto env = fixtures::flat(-5, 5);
    const auto pot = build_potential(env);
    CHECK(geometric_parameter(pot, env, {-1, 0, 1}) == 0.0);
    CHECK(geometric_parameter(pot, env, {-2, 0, 2}) == doctest::Approx(0.5).epsilon(1e-15));
    // Oracle: p = alpha_x P_{x+1}[T_x < T_b] + beta_x P_{x-1}[T_x < T_a] from two linear solves.
    for (Seed seed = 1; seed <= 20; ++seed) {
        const auto e = sample_environment(UniformSymmetric{0.1}, -20, 20, seed);
        const auto p = build_potential(e);
        for (Index a = -20; a <= -2; a += 3) {
            for (Index b = 2; b <= 20; b += 3) {
                const Index x = 0;
                const double right = b - x >= 2 ? oracle::solve_ruin(e, x, b).a_first(x + 1) : 0.0;
                const double left = x - a >= 2 ? oracle::solve_ruin(e, a, x).b_first(x - 1) : 0.0;
                const double expect = e.alpha(x) * right + e.beta(x) * left;
                const double got = geometric_parameter(p, e, {a, x, b});
                REQUIRE(rel(got, expect) < 1e-12);
                REQUIRE(got >= 0.0);
                REQUIRE(got < 1.0);
            }
        }
    }
}

TEST_CASE("flat excursion local time is one") {
    const auto env = fixtures::flat(-20, 20);
    const auto pot = build_potential(env);
    for (Index i = -5; i <= 5; ++i) {
        for (Index x = -15; x <= 15; ++x) {
            if (x == i) continue;
            REQUIRE(expected_local_time(pot, env, i, x) == doctest::Approx(1.0).epsilon(1e-13));
        }
    }
}

TEST_CASE("excursion local time closed form and per-site sandwich") {
    for (Seed seed = 1; seed <= 40; ++seed) {
        const auto env = sample_environment(UniformSymmetric{0.15}, -40, 40, seed);
        const auto pot = build_potential(env);
        const double eta0 = env.eta0();
        for (Index i = -20; i <= 20; i += 4) {
            for (Index x = -40; x <= 40; ++x) {
                if (x == i) continue;
                const double v = expected_local_time(pot, env, i, x);
                const double w = std::exp(-(pot(x) - pot(i)));
                // Ratio of the reversible measure e^{-S_k} / alpha_k.
                const double closed = env.alpha(i) / env.alpha(x) * w;
                REQUIRE(rel(v, closed) < 1e-12);
                REQUIRE(v >= sandwich_lower_factor(eta0) * w * (1 - 1e-12));
                REQUIRE(v <= sandwich_upper_factor(eta0) * w * (1 + 1e-12));
            }
        }
    }
}

TEST_CASE("excursion local time at a valley bottom matches the visit oracle") {
    const auto sc = compute_scales(10000, 2, 1.0);
    int compared = 0;
    for (Seed seed = 1; seed <= 20 && compared < 3; ++seed) {
        try {
            const auto search = search_basic_valley(TwoPointSymmetric{0.25}, seed, sc);
            const auto big = sample_environment(TwoPointSymmetric{0.25}, -(1 << 18), 1 << 18, seed);
            const auto pot = build_potential(big);
            const Index m = search.valley.mn;
            const auto visits = oracle::solve_expected_visits(big, m, 5);
            for (Index k = m - 5; k <= m + 5; ++k) {
                if (k == m) continue;
                REQUIRE(rel(expected_local_time(pot, big, m, k), visits.at(k)) < 1e-9);
            }
            ++compared;
        } catch (const Error& e) {
            REQUIRE((e.code() == ErrorCode::NoValley || e.code() == ErrorCode::TruncationNotConverged));
        }
    }
    CHECK(compared == 3);
}

TEST_CASE("occupation of simple regions") {
    const auto env = fixtures::flat(-5, 5);
    const auto pot = build_potential(env);
    CHECK(expected_occupation(pot, env, {-1, 1}, 0) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(expected_occupation(pot, env, {-4, 4}, 0) == doctest::Approx(9.0).epsilon(1e-14));
    const auto rnd = sample_environment(TwoPointSymmetric{0.25}, -10, 10, 3);
    const auto rp = build_potential(rnd);
    CHECK(expected_occupation(rp, rnd, {2, 2}, 2) == 1.0);
    CHECK(potential_sum(pot, {-1, 1}, 0) == doctest::Approx(2.0));
    CHECK(potential_sum(rp, {4, 4}, 4) == 0.0);
}

TEST_CASE("occupation terms equal individual local times") {
    for (Seed seed = 1; seed <= 20; ++seed) {
        const auto env = sample_environment(UniformSymmetric{0.1}, -50, 50, seed);
        const auto pot = build_potential(env);
        const Region region{-30, 45};
        for (Index m : {-30, -7, 0, 12, 45}) {
            const auto terms = expected_local_times(pot, env, region, m);
            double sum = 0.0;
            for (Index k = region.lo; k <= region.hi; ++k) {
                const double t = terms[static_cast<std::size_t>(k - region.lo)];
                if (k == m) REQUIRE(t == 1.0);
                else REQUIRE(rel(t, expected_local_time(pot, env, m, k)) < 1e-12);
                sum += t;
            }
            REQUIRE(rel(expected_occupation(pot, env, region, m), sum) < 1e-14);
        }
    }
}

TEST_CASE("occupation sandwich on valley environments") {
    const auto sc = compute_scales(1000000, 2, 1.0);
    int checked = 0;
    for (Seed seed = 1; seed <= 200; ++seed) {
        try {
            const auto s = search_basic_valley(TwoPointSymmetric{0.25}, seed, sc);
            const Region W{s.valley.Mn_prime, s.valley.Mn};
            const double occ = expected_occupation(s.potential, s.env, W, s.valley.mn);
            const double ps = potential_sum(s.potential, W, s.valley.mn);
            const double eta0 = s.env.eta0();
            REQUIRE(occ >= 1.0);
            REQUIRE(occ - 1.0 >= sandwich_lower_factor(eta0) * ps * (1 - 1e-12));
            REQUIRE(occ - 1.0 <= sandwich_upper_factor(eta0) * ps * (1 + 1e-12));
            ++checked;
        } catch (const Error& e) {
            REQUIRE(e.code() == ErrorCode::NoValley);
        }
    }
    CHECK(checked > 100);
}

TEST_CASE("potential sum on the staircase matches direct summation") {
    const auto pot = build_potential(fixtures::staircase());
    double direct = 0.0;
    for (Index k = -6; k <= 10; ++k) {
        if (k != 3) direct += 1.0 / std::exp(pot(k) - pot(3));
    }
    CHECK(rel(potential_sum(pot, {-6, 10}, 3), direct) < 1e-12);
}

TEST_CASE("deep potentials do not overflow the sums") {
    // Steep drift: S spans about 600 over the window.
    const auto env = fixtures::constant_env(-300, 300, 0.12);
    const auto pot = build_potential(env);
    const auto r = ruin_probabilities(pot, {-290, 0, 290});
    CHECK(std::isfinite(r.p_a_before_b));
    CHECK(std::abs(r.p_a_before_b + r.p_b_before_a - 1.0) < 1e-12);
    CHECK(std::isfinite(expected_exit_time(pot, env, {-100, 0, 100})));
    CHECK(std::isfinite(potential_sum(pot, {-280, 0}, 0)));
}
