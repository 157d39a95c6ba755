#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "fixtures.hpp"
#include "sinai/error.hpp"
#include "sinai/valleys.hpp"

using namespace sinai;

namespace {

// All pairs peak < trough (rightwards) maximizing S(peak) - S(trough), O(L^2).
double brute_drop(const Potential& pot, Index from, Index to) {
    double best = 0.0;
    const Index step = to >= from ? 1 : -1;
    for (Index i = from; i != to; i += step) {
        for (Index j = i + step; j != to + step; j += step) best = std::max(best, pot(i) - pot(j));
    }
    return best;
}

double max_on(const Potential& pot, Index lo, Index hi) {
    double m = pot(lo);
    for (Index k = lo; k <= hi; ++k) m = std::max(m, pot(k));
    return m;
}

double min_on(const Potential& pot, Index lo, Index hi) {
    double m = pot(lo);
    for (Index k = lo; k <= hi; ++k) m = std::min(m, pot(k));
    return m;
}

// Re-derives the basic valley conditions from S alone.
void check_basic_valley_conditions(const Potential& pot, const BasicValley& v, std::int64_t n,
                                   double gamma) {
    const double Gamma = std::log(static_cast<double>(n)) + gamma * std::log(std::log(static_cast<double>(n)));
    const double side = gamma * std::log(std::log(static_cast<double>(n)));
    REQUIRE(v.Mn_prime <= 0);
    REQUIRE(v.Mn >= 0);
    REQUIRE(v.Mn_prime < v.mn);
    REQUIRE(v.mn < v.Mn);
    REQUIRE(pot(v.Mn_prime) - pot(v.mn) >= Gamma);
    REQUIRE(pot(v.Mn) - pot(v.mn) >= Gamma);
    REQUIRE(min_on(pot, v.Mn_prime, v.Mn) == pot(v.mn));
    if (v.mn > 0) REQUIRE(pot(v.Mn_prime) - max_on(pot, 0, v.mn) >= side);
    if (v.mn < 0) REQUIRE(pot(v.Mn) - max_on(pot, v.mn, 0) >= side);
}

}  // namespace

TEST_CASE("flat potential has no candidate valley") {
    const auto pot = build_potential(fixtures::flat(-50, 50));
    CHECK_THROWS_AS(find_candidate_valley(pot, 1.0), Error);
    try {
        find_candidate_valley(pot, 1.0);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::WindowTooNarrow);
    }
}

TEST_CASE("staircase candidate valley") {
    const auto pot = build_potential(fixtures::staircase());
    const Valley v = find_candidate_valley(pot, 4.0);
    CHECK(v.left == -6);
    CHECK(v.right == 10);
    CHECK(v.bottom == 3);
    // Exhaustive check of the three defining conditions.
    CHECK(pot(v.left) == max_on(pot, v.left, v.bottom));
    CHECK(pot(v.right) == max_on(pot, v.bottom, v.right));
    CHECK(pot(v.bottom) == min_on(pot, v.left, v.right));
}

TEST_CASE("equal minima at +-k pick the positive one") {
    // S = 2, 1, 0, -1, 0, -1, 0... symmetric with minima at -1 and +1.
    const auto pot = fixtures::potential_from(-4, {3, 2, 1, -1, 0, -1, 1, 2, 3});
    const Valley v = find_candidate_valley(pot, 2.5);
    CHECK(v.bottom == 1);
}

TEST_CASE("right refinement examples") {
    const auto pot = fixtures::potential_from(0, {0, 2, -1, 3});
    const Refinement r = refine_right(pot, {0, 0, 3, 0.0});
    CHECK(r.peak == 1);
    CHECK(r.trough == 2);
    CHECK(r.drop == doctest::Approx(3.0));

    const auto up = fixtures::potential_from(0, {0, 1, 2, 3, 4});
    const Refinement z = refine_right(up, {0, 0, 4, 0.0});
    CHECK(z.drop == 0.0);
    CHECK(z.peak == 0);
    CHECK(z.trough == 1);
}

TEST_CASE("left refinement mirrors right refinement") {
    const auto pot = fixtures::potential_from(-3, {3, -1, 2, 0});
    const auto mirror = pot.mirrored();
    const Refinement l = refine_left(pot, {-3, 0, 0, 0.0});
    const Refinement r = refine_right(mirror, {0, 0, 3, 0.0});
    CHECK(l.peak == -r.peak);
    CHECK(l.trough == -r.trough);
    CHECK(l.drop == r.drop);
}

TEST_CASE("single-scan drawdown equals the brute-force maximum") {
    for (Seed seed = 1; seed <= 200; ++seed) {
        const auto env = sample_environment(UniformSymmetric{0.1}, -60, 60, seed);
        const auto pot = build_potential(env);
        const Valley right{0, 0, 60, 0.0};
        const Valley left{-60, 0, 0, 0.0};
        const auto r = refine_right(pot, right);
        const auto l = refine_left(pot, left);
        REQUIRE(r.drop == brute_drop(pot, 0, 60));
        REQUIRE(l.drop == brute_drop(pot, 0, -60));
        REQUIRE(pot(r.peak) - pot(r.trough) == r.drop);
        REQUIRE(r.peak < r.trough);
        REQUIRE(l.trough < l.peak);
    }
}

TEST_CASE("staircase basic valley") {
    const auto pot = build_potential(fixtures::staircase());
    const auto s = compute_scales(50, 2, 0.1);
    CHECK(s.Gamma_n == doctest::Approx(4.048).epsilon(1e-3));
    const BasicValley v = find_basic_valley(pot, s);
    CHECK(v.mn == 3);
    CHECK(v.Mn_prime == -1);
    CHECK(v.Mn == 7);
    CHECK(v.refinement_count == 0);
    CHECK(v.depth_left == doctest::Approx(4 * fixtures::kLn3));
    CHECK(v.depth_right == doctest::Approx(4 * fixtures::kLn3));
    // M' is the largest l < 0 meeting both the depth and the side condition, and
    // M the smallest l > m meeting the depth condition.
    for (Index l = v.Mn_prime + 1; l < 0; ++l) {
        CHECK_FALSE((pot(l) - pot(3) >= s.Gamma_n && pot(l) - max_on(pot, 0, 3) >= 0.1 * std::log(std::log(50.0))));
    }
    for (Index l = 4; l < v.Mn; ++l) CHECK(pot(l) - pot(3) < s.Gamma_n);
    check_basic_valley_conditions(pot, v, 50, 0.1);
}

TEST_CASE("bottom at the origin uses the symmetric equations") {
    const auto env = fixtures::staircase_env(-5, {5, 4, 3, 2, 1, 0, 1, 2, 3, 4, 5});
    const auto pot = build_potential(env);
    const BasicValley v = find_basic_valley(pot, 50, 2, 0.1);
    CHECK(v.mn == 0);
    CHECK(v.Mn_prime == -4);
    CHECK(v.Mn == 4);
    CHECK(v.refinement_count == 0);
}

TEST_CASE("a deep inner valley is found by refinement") {
    // S / ln 3: down from 6 at -6 to -4 at 4, up to 1 at 9, down to -10 at 20,
    // up to 4 at 34. The candidate bottom is 20; one refinement isolates the
    // valley around 4 that contains 0.
    std::vector<int> path;
    for (Index k = -6; k <= 34; ++k) {
        if (k <= 4) path.push_back(static_cast<int>(-k));
        else if (k <= 9) path.push_back(static_cast<int>(-4 + (k - 4)));
        else if (k <= 20) path.push_back(static_cast<int>(1 - (k - 9)));
        else path.push_back(static_cast<int>(-10 + (k - 20)));
    }
    const auto pot = build_potential(fixtures::staircase_env(-6, path));
    const auto sc = compute_scales(50, 2, 0.1);
    CHECK(find_candidate_valley(pot, sc.Gamma_n).bottom == 20);
    const BasicValley v = find_basic_valley(pot, sc);
    CHECK(v.refinement_count == 1);
    CHECK(v.mn == 4);
    CHECK(v.Mn_prime == -1);
    CHECK(v.Mn == 8);
    check_basic_valley_conditions(pot, v, 50, 0.1);
    CHECK(locate_mn_via_ladder(pot, sc.Gamma_n) == 4);
}

TEST_CASE("basic valley invariants hold on sampled environments") {
    int found = 0;
    for (Seed seed = 1; seed <= 300; ++seed) {
        const auto sc = compute_scales(1000000, 2, 1.0);
        try {
            const auto search = search_basic_valley(TwoPointSymmetric{0.25}, seed, sc);
            check_basic_valley_conditions(search.potential, search.valley, 1000000, 1.0);
            ++found;
        } catch (const Error& e) {
            REQUIRE(e.code() == ErrorCode::NoValley);
        }
    }
    const double failure = 1.0 - found / 300.0;
    CHECK(failure < 3.0 * 1.0 * std::log(std::log(1e6)) / std::log(1e6) * 5.0);
    CHECK(found >= 200);
}

TEST_CASE("basic valley of the mirrored potential is the mirror image") {
    int compared = 0;
    for (Seed seed = 1; seed <= 200; ++seed) {
        const auto env = sample_environment(UniformSymmetric{0.1}, -3000, 3000, seed);
        const auto pot = build_potential(env);
        try {
            const BasicValley v = find_basic_valley(pot, 10000, 2, 1.0);
            const BasicValley w = find_basic_valley(pot.mirrored(), 10000, 2, 1.0);
            if (v.mn == 0) continue;
            CHECK(w.mn == -v.mn);
            CHECK(w.Mn_prime == -v.Mn);
            CHECK(w.Mn == -v.Mn_prime);
            ++compared;
        } catch (const Error&) {
        }
    }
    CHECK(compared > 100);
}

TEST_CASE("ladder epochs") {
    const auto up = fixtures::potential_from(0, {0, 1, 2, 3});
    CHECK(ladder_epochs(up, 3).u == std::vector<Index>{0});
    const auto down = fixtures::potential_from(0, {0, -1, -2, -3});
    CHECK(ladder_epochs(down, 3).u == std::vector<Index>{0, 1, 2, 3});
    const auto pot = build_potential(fixtures::staircase());
    CHECK(ladder_epochs(pot, 10).u == std::vector<Index>{0, 1, 2, 3});
}

TEST_CASE("ladder location of the bottom") {
    const auto pot = build_potential(fixtures::staircase());
    const auto s = compute_scales(50, 2, 0.1);
    CHECK(locate_mn_via_ladder(pot, s.Gamma_n) == find_basic_valley(pot, s).mn);

    const auto rise = fixtures::potential_from(0, {0, 1, 2, 3, 4, 5});
    CHECK(locate_mn_via_ladder(rise, 4.5) == 0);

    const auto flat = build_potential(fixtures::flat(-10, 10));
    try {
        locate_mn_via_ladder(flat, 1.0);
        FAIL("expected NotFound");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotFound);
    }
}

TEST_CASE("ladder agrees with the basic valley when the bottom is positive") {
    int compared = 0;
    const auto sc = compute_scales(1000000, 2, 1.0);
    for (Seed seed = 1; compared < 150 && seed < 1000; ++seed) {
        try {
            const auto search = search_basic_valley(TwoPointSymmetric{0.25}, seed, sc);
            if (search.valley.mn <= 0) continue;
            REQUIRE(locate_mn_via_ladder(search.potential, sc.Gamma_n) == search.valley.mn);
            ++compared;
        } catch (const Error& e) {
            REQUIRE(e.code() == ErrorCode::NoValley);
        }
    }
    CHECK(compared == 150);
}
