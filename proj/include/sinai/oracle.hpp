#pragma once

#include <vector>

#include "sinai/environment.hpp"

namespace sinai::oracle {

// Solves sub[i] y[i-1] + diag[i] y[i] + super[i] y[i+1] = rhs[i] by forward
// elimination and back substitution. Throws Error(SingularSystem) on a zero pivot.
std::vector<double> solve_tridiagonal(const std::vector<double>& sub, const std::vector<double>& diag,
                                      const std::vector<double>& super, std::vector<double> rhs);

// Entries are indexed by x - a - 1 for a < x < b.
struct RuinTable {
    Index a = 0;
    Index b = 0;
    std::vector<double> hit_b_first;  // P_x[T_b < T_a]
    std::vector<double> hit_a_first;  // P_x[T_a < T_b], solved separately

    double b_first(Index x) const { return hit_b_first[static_cast<std::size_t>(x - a - 1)]; }
    double a_first(Index x) const { return hit_a_first[static_cast<std::size_t>(x - a - 1)]; }
};

RuinTable solve_ruin(const Environment& env, Index a, Index b);

struct ExitTable {
    Index a = 0;
    Index b = 0;
    std::vector<double> time;  // E_x[T_a ^ T_b]

    double at(Index x) const;  // zero at the boundaries
};

ExitTable solve_expected_exit(const Environment& env, Index a, Index b);

// Expected visits to each site of [m - radius, m + radius] during one excursion
// from m back to m; the entry at m is the single return visit.
struct VisitTable {
    Index m = 0;
    Index radius = 0;
    Index solved_left = 0;   // half-widths of the killed systems that converged
    Index solved_right = 0;
    std::vector<double> visits;

    double at(Index k) const { return visits[static_cast<std::size_t>(k - m + radius)]; }
};

inline constexpr double kVisitTolerance = 1e-12;

// Each side is a killed system beyond m +- (R+1). The killed visits are divided
// by the probability of returning to m before the kill site, computed from the
// same chain, and R doubles from `radius` until the entries change by less than
// `tolerance` (relative). Throws Error(TruncationNotConverged) once R reaches
// the window edge first, and Error(InvalidWindow) unless m +- (radius+1) lies
// in the window.
VisitTable solve_expected_visits(const Environment& env, Index m, Index radius,
                                 double tolerance = kVisitTolerance);

}  // namespace sinai::oracle
