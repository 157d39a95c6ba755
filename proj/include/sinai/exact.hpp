#pragma once

#include <vector>

#include "sinai/environment.hpp"

namespace sinai::exact {

struct IntervalQuery {
    Index a = 0;
    Index x = 0;
    Index b = 0;
};

struct RuinProbabilities {
    double p_a_before_b = 0.0;  // P_x[T_a < T_b]
    double p_b_before_a = 0.0;  // P_x[T_b < T_a]
};

// Hitting probabilities for a < x < b. Both values come from separate positive
// sums, so each is accurate in relative terms even when it is tiny.
RuinProbabilities ruin_probabilities(const Potential& pot, const IntervalQuery& q);

// E_{a+1}[T_a ^ T_b] from the double sum over F(j, l) = exp(S_j - S_l).
double exit_time_from_neighbor(const Potential& pot, const Environment& env, Index a, Index b);

// E_x[T_a ^ T_b] for a < x < b.
double expected_exit_time(const Potential& pot, const Environment& env, const IntervalQuery& q);

// Success probability p of the geometric law of xi(x, T_a ^ T_b) under P_x:
// P[xi = k] = p^k (1 - p).
double geometric_parameter(const Potential& pot, const Environment& env, const IntervalQuery& q);

// E_i[xi(x, T_i)] for i != x.
double expected_local_time(const Potential& pot, const Environment& env, Index i, Index x);

struct Region {
    Index lo = 0;
    Index hi = 0;
    bool contains(Index k) const noexcept { return k >= lo && k <= hi; }
};

// E_m[xi(k, T_m)] for every k in the region, indexed by k - region.lo; the
// entry at m is 1.
std::vector<double> expected_local_times(const Potential& pot, const Environment& env,
                                         const Region& region, Index m);

// E_m[xi(region, T_m)] = 1 + sum over k in region, k != m, of E_m[xi(k, T_m)].
double expected_occupation(const Potential& pot, const Environment& env, const Region& region,
                           Index m);

// Sum over k in region, k != m, of exp(-(S_k - S_m)).
double potential_sum(const Potential& pot, const Region& region, Index m);

// Lower and upper factors of the per-site sandwich
// eta0/(1-eta0) e^{-(S_x-S_i)} <= E_i[xi(x, T_i)] <= (1/eta0) e^{-(S_x-S_i)}.
double sandwich_lower_factor(double eta0);
double sandwich_upper_factor(double eta0);

}  // namespace sinai::exact
