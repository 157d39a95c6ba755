#include "sinai/valleys.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "sinai/error.hpp"

namespace sinai {

namespace {

// Smaller |index| first, positive index on exact |index| ties.
bool closer_to_origin(Index a, Index b) {
    const auto aa = std::llabs(a);
    const auto ab = std::llabs(b);
    return aa < ab || (aa == ab && a > b);
}

// Maximum drop from a running maximum while walking from `from` towards `to`.
// Single pass; the peak of each candidate pair is the running-max position at
// the time its trough is scanned.
Refinement max_drop(const Potential& pot, Index from, Index to) {
    const Index step = to >= from ? 1 : -1;
    Refinement best{from, from == to ? from : from + step, 0.0};
    Index peak = from;
    double peak_value = pot(from);
    for (Index t = from; t != to + step; t += step) {
        const double s = pot(t);
        if (s > peak_value || (s == peak_value && closer_to_origin(t, peak))) {
            peak = t;
            peak_value = s;
            continue;
        }
        const double drop = peak_value - s;
        if (drop <= 0.0) continue;
        if (drop > best.drop ||
            (drop == best.drop && (closer_to_origin(t, best.trough) ||
                                   (t == best.trough && closer_to_origin(peak, best.peak))))) {
            best = {peak, t, drop};
        }
    }
    return best;
}

Index argmin_closest(const Potential& pot, Index lo, Index hi) {
    Index best = lo;
    for (Index k = lo + 1; k <= hi; ++k) {
        if (pot(k) < pot(best) || (pot(k) == pot(best) && closer_to_origin(k, best))) best = k;
    }
    return best;
}

double max_over(const Potential& pot, Index lo, Index hi) {
    double m = pot(lo);
    for (Index k = lo + 1; k <= hi; ++k) m = std::max(m, pot(k));
    return m;
}

// One admissible refinement step; returns false when neither flank holds a
// drop of at least Gamma.
bool refine_once(const Potential& pot, double Gamma, Valley& v) {
    auto try_right = [&]() {
        const Refinement r = refine_right(pot, v);
        if (r.drop < Gamma) return false;
        if (r.peak > 0) {
            v = {v.left, v.bottom, r.peak, valley_depth(pot, v.left, v.bottom, r.peak)};
        } else {
            v = {r.peak, r.trough, v.right, valley_depth(pot, r.peak, r.trough, v.right)};
        }
        return true;
    };
    auto try_left = [&]() {
        const Refinement r = refine_left(pot, v);
        if (r.drop < Gamma) return false;
        if (r.peak > 0) {
            v = {v.left, r.trough, r.peak, valley_depth(pot, v.left, r.trough, r.peak)};
        } else {
            v = {r.peak, v.bottom, v.right, valley_depth(pot, r.peak, v.bottom, v.right)};
        }
        return true;
    };
    // The flank away from the origin goes first.
    if (v.bottom >= 0) return try_right() || try_left();
    return try_left() || try_right();
}

}  // namespace

double valley_depth(const Potential& pot, Index left, Index bottom, Index right) {
    return std::min(pot(left) - pot(bottom), pot(right) - pot(bottom));
}

Valley find_candidate_valley(const Potential& pot, double Gamma) {
    Index left = 0;
    for (Index k = -1; k >= pot.lo(); --k) {
        if (pot(k) >= Gamma) { left = k; break; }
    }
    Index right = 0;
    for (Index k = 1; k <= pot.hi(); ++k) {
        if (pot(k) >= Gamma) { right = k; break; }
    }
    if (left == 0 || right == 0) {
        throw Error(ErrorCode::WindowTooNarrow,
                    std::string("potential never reaches level ") + std::to_string(Gamma) +
                        (left == 0 ? " left of 0" : " right of 0"));
    }
    const Index bottom = argmin_closest(pot, left, right);
    return {left, bottom, right, valley_depth(pot, left, bottom, right)};
}

Refinement refine_right(const Potential& pot, const Valley& v) {
    return max_drop(pot, v.bottom, v.right);
}

Refinement refine_left(const Potential& pot, const Valley& v) {
    return max_drop(pot, v.bottom, v.left);
}

BasicValley find_basic_valley(const Potential& pot, std::int64_t n, int p, double gamma) {
    return find_basic_valley(pot, compute_scales(n, p, gamma));
}

BasicValley find_basic_valley(const Potential& pot, const Scales& scales) {
    const double Gamma = scales.Gamma_n;
    const double side = scales.gamma * std::log(std::log(static_cast<double>(scales.n)));

    Valley v = find_candidate_valley(pot, Gamma);
    int refinements = 0;
    while (refine_once(pot, Gamma, v)) ++refinements;

    const Index m = v.bottom;
    const double sm = pot(m);
    Index left = 0;
    Index right = 0;
    bool found_left = false;
    bool found_right = false;
    if (m > 0) {
        const double ridge = max_over(pot, 0, m);
        for (Index l = -1; l >= pot.lo(); --l) {
            if (pot(l) - sm >= Gamma && pot(l) - ridge >= side) { left = l; found_left = true; break; }
        }
        for (Index l = m + 1; l <= pot.hi(); ++l) {
            if (pot(l) - sm >= Gamma) { right = l; found_right = true; break; }
        }
    } else if (m < 0) {
        const double ridge = max_over(pot, m, 0);
        for (Index l = m - 1; l >= pot.lo(); --l) {
            if (pot(l) - sm >= Gamma) { left = l; found_left = true; break; }
        }
        for (Index l = 1; l <= pot.hi(); ++l) {
            if (pot(l) - sm >= Gamma && pot(l) - ridge >= side) { right = l; found_right = true; break; }
        }
    } else {
        for (Index l = -1; l >= pot.lo(); --l) {
            if (pot(l) - sm >= Gamma) { left = l; found_left = true; break; }
        }
        for (Index l = 1; l <= pot.hi(); ++l) {
            if (pot(l) - sm >= Gamma) { right = l; found_right = true; break; }
        }
    }
    if (!found_left || !found_right) {
        throw Error(ErrorCode::WindowTooNarrow, "boundary of the basic valley lies outside the window");
    }
    // The side condition can push a boundary past a deeper minimum; then no
    // valley with bottom m satisfies all the defining properties.
    for (Index k = left; k <= right; ++k) {
        if (pot(k) < sm) {
            throw Error(ErrorCode::NoValley, "side condition at bottom " + std::to_string(m) +
                                                 " reaches a deeper minimum at " + std::to_string(k));
        }
    }

    BasicValley b;
    b.Mn_prime = left;
    b.mn = m;
    b.Mn = right;
    b.Gamma_n = Gamma;
    b.gamma = scales.gamma;
    b.refinement_count = refinements;
    b.depth_left = pot(left) - sm;
    b.depth_right = pot(right) - sm;
    return b;
}

LadderEpochs ladder_epochs(const Potential& pot, Index limit) {
    LadderEpochs out;
    out.u.push_back(0);
    const Index end = std::min(limit, pot.hi());
    double current = pot(0);
    for (Index m = 1; m <= end; ++m) {
        if (pot(m) < current) {
            out.u.push_back(m);
            current = pot(m);
        }
    }
    return out;
}

Index locate_mn_via_ladder(const Potential& pot, double Gamma_n) {
    Index u = 0;
    double su = pot(0);
    for (Index j = 1; j <= pot.hi(); ++j) {
        const double s = pot(j);
        if (s < su) {
            u = j;
            su = s;
        } else if (s - su >= Gamma_n) {
            return u;
        }
    }
    throw Error(ErrorCode::NotFound, "no ladder interval rises by Gamma_n inside the window");
}

ValleySearch search_basic_valley(const DistributionSpec& spec, Seed seed, const Scales& scales,
                                 int max_doublings) {
    const HypothesisReport report = validate_distribution(spec);
    Index radius = default_window_radius(scales.Gamma_n, std::sqrt(report.sigma2));
    for (int attempt = 0;; ++attempt) {
        Environment env = sample_environment(spec, -radius, radius, seed);
        Potential pot = build_potential(env);
        try {
            BasicValley v = find_basic_valley(pot, scales);
            return {std::move(env), std::move(pot), v, attempt};
        } catch (const Error& e) {
            if (e.code() != ErrorCode::WindowTooNarrow) throw;
            if (attempt >= max_doublings) {
                throw Error(ErrorCode::NoValley, "window expansion exhausted at radius " +
                                                     std::to_string(radius));
            }
        }
        radius *= 2;
    }
}

}  // namespace sinai
