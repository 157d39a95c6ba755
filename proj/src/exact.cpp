#include "sinai/exact.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "sinai/error.hpp"

namespace sinai::exact {

namespace {

void require_query(const Potential& pot, Index a, Index x, Index b) {
    if (!(a < x && x < b)) {
        throw Error(ErrorCode::DegenerateInterval,
                    "need a < x < b, got a=" + std::to_string(a) + " x=" + std::to_string(x) +
                        " b=" + std::to_string(b));
    }
    if (a < pot.lo() || b > pot.hi()) {
        throw Error(ErrorCode::InvalidWindow, "interval [" + std::to_string(a) + ", " +
                                                  std::to_string(b) + "] leaves the window");
    }
}

double max_over(const Potential& pot, Index lo, Index hi) {
    double m = pot(lo);
    for (Index k = lo + 1; k <= hi; ++k) m = std::max(m, pot(k));
    return m;
}

// sum_{k=lo}^{hi} exp(S_k - shift); zero for an empty range.
double shifted_sum(const Potential& pot, Index lo, Index hi, double shift) {
    double acc = 0.0;
    for (Index k = lo; k <= hi; ++k) acc += std::exp(pot(k) - shift);
    return acc;
}

// P_s[T_b < T_a] for a <= s <= b.
double hit_right_first(const Potential& pot, Index a, Index s, Index b) {
    if (s == b) return 1.0;
    if (s == a) return 0.0;
    return ruin_probabilities(pot, {a, s, b}).p_b_before_a;
}

// P_s[T_a < T_b] for a <= s <= b.
double hit_left_first(const Potential& pot, Index a, Index s, Index b) {
    if (s == a) return 1.0;
    if (s == b) return 0.0;
    return ruin_probabilities(pot, {a, s, b}).p_a_before_b;
}

void require_site(const Potential& pot, Index k, const char* what) {
    if (k < pot.lo() || k > pot.hi()) {
        throw Error(ErrorCode::InvalidWindow, std::string(what) + " " + std::to_string(k) +
                                                  " outside the window");
    }
}

}  // namespace

RuinProbabilities ruin_probabilities(const Potential& pot, const IntervalQuery& q) {
    require_query(pot, q.a, q.x, q.b);
    const double shift = max_over(pot, q.a, q.b - 1);
    const double below = shifted_sum(pot, q.a, q.x - 1, shift);
    const double above = shifted_sum(pot, q.x, q.b - 1, shift);
    const double total = below + above;
    return {above / total, below / total};
}

double exit_time_from_neighbor(const Potential& pot, const Environment& env, Index a, Index b) {
    require_query(pot, a, a + 1, b);
    const double shift = max_over(pot, a, b - 1);
    // Numerator: sum_l (1/alpha_l) e^{-S_l} sum_{j=l}^{b-1} e^{S_j}, via a suffix sum.
    double suffix = 0.0;
    double numerator = 0.0;
    for (Index l = b - 1; l >= a + 1; --l) {
        suffix += std::exp(pot(l) - shift);
        numerator += suffix * std::exp(shift - pot(l)) / env.alpha(l);
    }
    const double denominator = shifted_sum(pot, a, b - 1, shift) * std::exp(shift - pot(a));
    return numerator / denominator;
}

double expected_exit_time(const Potential& pot, const Environment& env, const IntervalQuery& q) {
    require_query(pot, q.a, q.x, q.b);
    // Green's function of the killed chain with scale s(k) = sum_{i=a}^{k-1} e^{S_i}
    // and speed m_l = e^{-S_l} / alpha_l; every term is positive.
    const double shift = max_over(pot, q.a, q.b - 1);
    const auto len = static_cast<std::size_t>(q.b - q.a + 1);
    // Prefix s(k) - s(a) and suffix s(b) - s(k) are accumulated separately so
    // no difference of sums is ever formed.
    std::vector<double> pre(len, 0.0), suf(len, 0.0);
    for (Index k = q.a + 1; k <= q.b; ++k) {
        const auto i = static_cast<std::size_t>(k - q.a);
        pre[i] = pre[i - 1] + std::exp(pot(k - 1) - shift);
    }
    for (Index k = q.b - 1; k >= q.a; --k) {
        const auto i = static_cast<std::size_t>(k - q.a);
        suf[i] = suf[i + 1] + std::exp(pot(k) - shift);
    }
    auto at = [&](const std::vector<double>& v, Index k) { return v[static_cast<std::size_t>(k - q.a)]; };
    auto speed = [&](Index l) { return std::exp(shift - pot(l)) / env.alpha(l); };
    double inner = 0.0;
    for (Index l = q.a + 1; l <= q.x; ++l) inner += at(pre, l) * speed(l);
    double outer = 0.0;
    for (Index l = q.x + 1; l <= q.b - 1; ++l) outer += at(suf, l) * speed(l);
    return (at(suf, q.x) * inner + at(pre, q.x) * outer) / at(pre, q.b);
}

double geometric_parameter(const Potential& pot, const Environment& env, const IntervalQuery& q) {
    require_query(pot, q.a, q.x, q.b);
    const double right = hit_left_first(pot, q.x, q.x + 1, q.b);
    const double left = hit_right_first(pot, q.a, q.x - 1, q.x);
    return env.alpha(q.x) * right + env.beta(q.x) * left;
}

double expected_local_time(const Potential& pot, const Environment& env, Index i, Index x) {
    if (i == x) throw Error(ErrorCode::DegenerateInterval, "expected_local_time needs i != x");
    require_site(pot, i, "site");
    require_site(pot, x, "site");
    if (x > i) {
        const double reach = hit_right_first(pot, i, i + 1, x);
        const double escape = hit_left_first(pot, i, x - 1, x);
        return env.alpha(i) * reach / (env.beta(x) * escape);
    }
    const double reach = hit_left_first(pot, x, i - 1, i);
    const double escape = hit_right_first(pot, x, x + 1, i);
    return env.beta(i) * reach / (env.alpha(x) * escape);
}

std::vector<double> expected_local_times(const Potential& pot, const Environment& env,
                                         const Region& region, Index m) {
    if (!region.contains(m)) throw Error(ErrorCode::InvalidWindow, "m must lie in the region");
    require_site(pot, region.lo, "region end");
    require_site(pot, region.hi, "region end");
    const double sm = pot(m);
    std::vector<double> out(static_cast<std::size_t>(region.hi - region.lo + 1), 0.0);
    auto at = [&](Index k) -> double& { return out[static_cast<std::size_t>(k - region.lo)]; };
    at(m) = 1.0;

    // Right of m the two ruin factors on [m, x] share the denominator
    // D = sum_{k=m}^{x-1} e^{S_k - S_m}: reach = 1/D, escape = e^{S_{x-1} - S_m}/D.
    double d = 0.0;
    for (Index x = m + 1; x <= region.hi; ++x) {
        const double last = std::exp(pot(x - 1) - sm);
        d += last;
        const double reach = 1.0 / d;
        const double escape = last / d;
        at(x) = env.alpha(m) * reach / (env.beta(x) * escape);
    }
    // Left of m on [x, m] the shared sum is sum_{k=x}^{m-1} e^{S_k - S_m}:
    // reach = e^{S_{m-1} - S_m}/D and escape = e^{S_x - S_m}/D.
    d = 0.0;
    const double top = m - 1 >= pot.lo() ? std::exp(pot(m - 1) - sm) : 0.0;
    for (Index x = m - 1; x >= region.lo; --x) {
        const double first = std::exp(pot(x) - sm);
        d += first;
        const double reach = top / d;
        const double escape = first / d;
        at(x) = env.beta(m) * reach / (env.alpha(x) * escape);
    }
    return out;
}

double expected_occupation(const Potential& pot, const Environment& env, const Region& region,
                           Index m) {
    const auto terms = expected_local_times(pot, env, region, m);
    double total = 0.0;
    for (double t : terms) total += t;
    return total;
}

double potential_sum(const Potential& pot, const Region& region, Index m) {
    if (!region.contains(m)) throw Error(ErrorCode::InvalidWindow, "m must lie in the region");
    require_site(pot, region.lo, "region end");
    require_site(pot, region.hi, "region end");
    const double sm = pot(m);
    double shift = 0.0;
    bool any = false;
    for (Index k = region.lo; k <= region.hi; ++k) {
        if (k == m) continue;
        const double v = sm - pot(k);
        shift = any ? std::max(shift, v) : v;
        any = true;
    }
    if (!any) return 0.0;
    double acc = 0.0;
    for (Index k = region.lo; k <= region.hi; ++k) {
        if (k != m) acc += std::exp(sm - pot(k) - shift);
    }
    return acc * std::exp(shift);
}

double sandwich_lower_factor(double eta0) { return eta0 / (1.0 - eta0); }

double sandwich_upper_factor(double eta0) { return 1.0 / eta0; }

}  // namespace sinai::exact
