#pragma once

#include <cstdint>
#include <vector>

#include "sinai/environment.hpp"

namespace sinai {

// A triple {left, bottom, right} where S(left) is the max of S on [left, bottom],
// S(right) the max on [bottom, right] and S(bottom) the min on [left, right].
struct Valley {
    Index left = 0;
    Index bottom = 0;
    Index right = 0;
    double depth = 0.0;  // min(S(left) - S(bottom), S(right) - S(bottom))
};

double valley_depth(const Potential& pot, Index left, Index bottom, Index right);

// Largest drop S(peak) - S(trough) inside one flank of a valley. For a right
// refinement bottom <= peak < trough <= right; for a left refinement
// left <= trough < peak <= bottom.
struct Refinement {
    Index peak = 0;
    Index trough = 0;
    double drop = 0.0;
};

// Candidate valley from the first crossings of level Gamma on each side of 0.
// Throws Error(WindowTooNarrow) if S never reaches Gamma on one side.
Valley find_candidate_valley(const Potential& pot, double Gamma);

Refinement refine_right(const Potential& pot, const Valley& v);
Refinement refine_left(const Potential& pot, const Valley& v);

struct BasicValley {
    Index Mn_prime = 0;
    Index mn = 0;
    Index Mn = 0;
    double Gamma_n = 0.0;
    double gamma = 0.0;
    int refinement_count = 0;
    double depth_left = 0.0;   // S(Mn') - S(mn)
    double depth_right = 0.0;  // S(Mn) - S(mn)

    bool contains(Index k) const noexcept { return k >= Mn_prime && k <= Mn; }
};

// Smallest valley containing 0 of depth at least Gamma_n, followed by the
// boundary equations for Mn' and Mn. Throws WindowTooNarrow when the window
// does not reach far enough and NoValley when no admissible valley exists.
BasicValley find_basic_valley(const Potential& pot, const Scales& scales);
BasicValley find_basic_valley(const Potential& pot, std::int64_t n, int p, double gamma);

// Successive strict running minima of S to the right of 0: u_0 = 0,
// u_i = inf{m > u_{i-1} : S(m) < S(u_{i-1})}, truncated at `limit`.
struct LadderEpochs {
    std::vector<Index> u;
};

LadderEpochs ladder_epochs(const Potential& pot, Index limit);

// First ladder epoch from which S rises by Gamma_n before a new minimum.
// Throws Error(NotFound) if the window ends first.
Index locate_mn_via_ladder(const Potential& pot, double Gamma_n);

// Environment sampled around the origin with the default radius policy and
// grown by doubling (at most `max_doublings` times) on WindowTooNarrow.
struct ValleySearch {
    Environment env;
    Potential potential;
    BasicValley valley;
    int doublings = 0;
};

ValleySearch search_basic_valley(const DistributionSpec& spec, Seed seed, const Scales& scales,
                                 int max_doublings = 3);

}  // namespace sinai
