#include <algorithm>
#include <cmath>
#include <limits>

#include "sinai/analysis.hpp"
#include "sinai/error.hpp"
#include "sinai/exact.hpp"

namespace sinai {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double flag(bool b) { return b ? 1.0 : 0.0; }

double max_over(const Potential& pot, Index lo, Index hi) {
    double m = pot(lo);
    for (Index k = lo + 1; k <= hi; ++k) m = std::max(m, pot(k));
    return m;
}

// log of min over k in (m, m+f] of beta_k P_{k-1}[T_m < T_k], or the mirror
// alpha_k P_{k+1}[T_m < T_k] over [m-f, m) when dir < 0.
double log_min_escape(const Potential& pot, const Environment& env, Index m, std::int64_t f,
                      int dir) {
    double best = std::numeric_limits<double>::infinity();
    for (std::int64_t j = 1; j <= f; ++j) {
        const Index k = m + dir * j;
        if (!pot.contains(k)) break;
        double escape = 1.0;
        if (j > 1) {
            const auto r = dir > 0 ? exact::ruin_probabilities(pot, {m, k - 1, k})
                                   : exact::ruin_probabilities(pot, {k, k + 1, m});
            escape = dir > 0 ? r.p_a_before_b : r.p_b_before_a;
        }
        const double step = dir > 0 ? env.beta(k) : env.alpha(k);
        best = std::min(best, std::log(step * escape));
    }
    return best;
}

}  // namespace

bool evaluate(const PropertyCheck& check) {
    if (!check.evaluated || std::isnan(check.measured)) return false;
    return check.comparison == Comparison::AtLeast ? check.measured >= check.threshold
                                                   : check.measured <= check.threshold;
}

const PropertyCheck* GoodEnvReport::find(const std::string& name) const {
    for (const auto& c : checks) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

void GoodEnvReport::recompute() {
    good = !checks.empty();
    for (auto& c : checks) {
        c.passed = evaluate(c);
        good = good && c.passed;
    }
}

GoodEnvReport check_good_environment(const Environment& env, const Potential& pot, std::int64_t n,
                                     int p, double gamma, double c1) {
    const Scales sc = compute_scales(n, p, gamma, env.sigma(), env.ie());
    const double log1 = std::log(static_cast<double>(n));
    const double log2 = std::log(log1);
    const double bound = std::pow(log1 / env.sigma(), 2) * iterated_log(static_cast<double>(n), p);
    const double occupation_cap = c1 * iterated_log(static_cast<double>(n), p + 1);
    const double outside_cap = 2.0 / (env.eta0() * static_cast<double>(sc.f_p + 1));

    GoodEnvReport r;
    r.n = n;
    r.p = p;
    r.gamma = gamma;
    r.c1 = c1;

    auto add = [&](const char* name, double measured, double threshold, Comparison cmp) {
        r.checks.push_back({name, measured, threshold, cmp, true, false});
    };

    std::optional<BasicValley> v;
    try {
        v = find_basic_valley(pot, sc);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::NoValley && e.code() != ErrorCode::WindowTooNarrow) throw;
    }
    add("valley_exists", flag(v.has_value()), 1.0, Comparison::AtLeast);
    if (!v) {
        const char* rest[] = {"contains_origin",    "side_condition",    "depth_left",
                              "depth_right",        "position_left",     "position_right",
                              "refinement_left",    "refinement_right",  "g1_minimum_right",
                              "g1_minimum_left",    "occupation_window", "occupation_outside"};
        for (const char* name : rest) r.checks.push_back({name, kNaN, kNaN, Comparison::AtLeast, false, false});
        r.recompute();
        return r;
    }
    r.valley = v;
    const Index m = v->mn;
    const double sm = pot(m);

    add("contains_origin", flag(v->contains(0)), 1.0, Comparison::AtLeast);

    double side = 0.0;
    if (m > 0) side = pot(v->Mn_prime) - max_over(pot, 0, m);
    else if (m < 0) side = pot(v->Mn) - max_over(pot, m, 0);
    else side = std::min(pot(v->Mn_prime), pot(v->Mn)) - sm;
    add("side_condition", side, gamma * log2, Comparison::AtLeast);

    add("depth_left", pot(v->Mn_prime) - sm, sc.Gamma_n, Comparison::AtLeast);
    add("depth_right", pot(v->Mn) - sm, sc.Gamma_n, Comparison::AtLeast);
    add("position_left", static_cast<double>(v->Mn_prime), -bound, Comparison::AtLeast);
    add("position_right", static_cast<double>(v->Mn), bound, Comparison::AtMost);

    const Valley basic{v->Mn_prime, m, v->Mn, std::min(v->depth_left, v->depth_right)};
    add("refinement_left", refine_left(pot, basic).drop, log1 - gamma * log2, Comparison::AtMost);
    add("refinement_right", refine_right(pot, basic).drop, log1 - gamma * log2, Comparison::AtMost);

    add("g1_minimum_right", log_min_escape(pot, env, m, sc.f_p, +1), -sc.log_g1, Comparison::AtLeast);
    add("g1_minimum_left", log_min_escape(pot, env, m, sc.f_p, -1), -sc.log_g1, Comparison::AtLeast);

    const exact::Region W{v->Mn_prime, v->Mn};
    const auto terms = exact::expected_local_times(pot, env, W, m);
    double inside = 0.0;
    double outside = 0.0;
    for (Index k = W.lo; k <= W.hi; ++k) {
        const double t = terms[static_cast<std::size_t>(k - W.lo)];
        if (std::llabs(k - m) <= sc.f_p) inside += t;
        else outside += t;
    }
    add("occupation_window", inside, occupation_cap, Comparison::AtMost);
    add("occupation_outside", outside, outside_cap, Comparison::AtMost);

    r.recompute();
    return r;
}

}  // namespace sinai
