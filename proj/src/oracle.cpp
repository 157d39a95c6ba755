#include "sinai/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sinai/error.hpp"

namespace sinai::oracle {

namespace {

void require_interval(const Environment& env, Index a, Index b) {
    if (a >= b - 1) {
        throw Error(ErrorCode::DegenerateInterval, "need a < b - 1, got a=" + std::to_string(a) +
                                                       " b=" + std::to_string(b));
    }
    if (!env.contains(a) || !env.contains(b)) {
        throw Error(ErrorCode::InvalidWindow, "interval leaves the environment window");
    }
}

// First-step operator of a birth-death chain on n interior sites,
// row i: y_i - up_i y_{i+1} - down_i y_{i-1}, killed beyond both ends.
// Pivots come from the absorbed mass e_i, so elimination never subtracts and
// every entry keeps full relative accuracy for nonnegative right-hand sides.
class BirthDeath {
public:
    BirthDeath(std::vector<double> up, std::vector<double> down)
        : up_(std::move(up)), down_(std::move(down)), pivot_(up_.size()) {
        double e = 1.0;
        double p = 1.0;
        for (std::size_t i = 0; i < pivot_.size(); ++i) {
            const double carry = e / p;
            pivot_[i] = up_[i] + down_[i] * carry;
            e = down_[i] * carry;
            p = pivot_[i];
            if (!(p > 0.0) || !std::isfinite(p)) {
                throw Error(ErrorCode::SingularSystem, "zero pivot at row " + std::to_string(i));
            }
        }
    }

    std::vector<double> solve(std::vector<double> r) const {
        const std::size_t n = r.size();
        for (std::size_t i = 1; i < n; ++i) r[i] += down_[i] * r[i - 1] / pivot_[i - 1];
        r[n - 1] /= pivot_[n - 1];
        for (std::size_t i = n - 1; i-- > 0;) r[i] = (r[i] + up_[i] * r[i + 1]) / pivot_[i];
        return r;
    }

    // Same system transposed: y_i - up_{i-1} y_{i-1} - down_{i+1} y_{i+1}.
    std::vector<double> solve_transposed(std::vector<double> r) const {
        const std::size_t n = r.size();
        r[0] /= pivot_[0];
        for (std::size_t i = 1; i < n; ++i) r[i] = (r[i] + up_[i - 1] * r[i - 1]) / pivot_[i];
        for (std::size_t i = n - 1; i-- > 0;) r[i] += down_[i + 1] * r[i + 1] / pivot_[i];
        return r;
    }

    std::size_t size() const noexcept { return pivot_.size(); }

private:
    std::vector<double> up_, down_, pivot_;
};

BirthDeath interior(const Environment& env, Index a, Index b) {
    const auto n = static_cast<std::size_t>(b - a - 1);
    std::vector<double> up(n), down(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Index x = a + 1 + static_cast<Index>(i);
        up[i] = env.alpha(x);
        down[i] = env.beta(x);
    }
    return BirthDeath(std::move(up), std::move(down));
}

// One side of an excursion from m, with sites y_j = m + dir*j, j = 1..R, and
// killing at m + dir(R+1). "up" points away from m.
BirthDeath half_chain(const Environment& env, Index m, int dir, Index R) {
    const auto n = static_cast<std::size_t>(R);
    std::vector<double> up(n), down(n);
    for (std::size_t j = 0; j < n; ++j) {
        const Index y = m + dir * static_cast<Index>(j + 1);
        up[j] = dir > 0 ? env.alpha(y) : env.beta(y);
        down[j] = dir > 0 ? env.beta(y) : env.alpha(y);
    }
    return BirthDeath(std::move(up), std::move(down));
}

// Expected visits to y_1..y_count before T_m. The killed visits (adjoint
// system with the first outward step as source) are divided by
// P_y[T_m < kill], which removes the truncation exactly.
std::vector<double> corrected_half(const Environment& env, Index m, int dir, Index R, Index count) {
    const BirthDeath chain = half_chain(env, m, dir, R);
    std::vector<double> source(chain.size(), 0.0);
    source[0] = dir > 0 ? env.alpha(m) : env.beta(m);
    std::vector<double> v = chain.solve_transposed(std::move(source));
    std::vector<double> hit(chain.size(), 0.0);
    hit[0] = dir > 0 ? env.beta(m + 1) : env.alpha(m - 1);
    const std::vector<double> back = chain.solve(std::move(hit));
    v.resize(static_cast<std::size_t>(count));
    for (std::size_t j = 0; j < v.size(); ++j) v[j] /= back[j];
    return v;
}

std::vector<double> converged_half(const Environment& env, Index m, int dir, Index radius,
                                   double tolerance, Index& solved) {
    // The kill site m + dir(R+1) must lie inside the window.
    const Index limit = (dir > 0 ? env.hi() - m : m - env.lo()) - 1;
    Index R = radius;
    std::vector<double> prev = corrected_half(env, m, dir, R, radius);
    while (R < limit) {
        const Index next_R = std::min(2 * R, limit);
        std::vector<double> next = corrected_half(env, m, dir, next_R, radius);
        double change = 0.0;
        for (std::size_t j = 0; j < next.size(); ++j) {
            change = std::max(change, std::abs(next[j] - prev[j]) / std::abs(next[j]));
        }
        R = next_R;
        prev = std::move(next);
        if (change < tolerance) {
            solved = R;
            return prev;
        }
    }
    throw Error(ErrorCode::TruncationNotConverged,
                "excursion visits at " + std::to_string(m) + " did not converge before the " +
                    (dir > 0 ? std::string("right") : std::string("left")) + " window edge");
}

}  // namespace

std::vector<double> solve_tridiagonal(const std::vector<double>& sub, const std::vector<double>& diag,
                                      const std::vector<double>& super, std::vector<double> rhs) {
    const std::size_t n = diag.size();
    if (sub.size() != n || super.size() != n || rhs.size() != n) {
        throw Error(ErrorCode::SingularSystem, "tridiagonal bands have mismatched lengths");
    }
    std::vector<double> c(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double pivot = diag[i] - (i > 0 ? sub[i] * c[i - 1] : 0.0);
        if (pivot == 0.0 || !std::isfinite(pivot)) {
            throw Error(ErrorCode::SingularSystem, "zero pivot at row " + std::to_string(i));
        }
        c[i] = super[i] / pivot;
        rhs[i] = (rhs[i] - (i > 0 ? sub[i] * rhs[i - 1] : 0.0)) / pivot;
    }
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= c[i] * rhs[i + 1];
    return rhs;
}

RuinTable solve_ruin(const Environment& env, Index a, Index b) {
    require_interval(env, a, b);
    const BirthDeath chain = interior(env, a, b);
    const auto n = chain.size();
    std::vector<double> right(n, 0.0);
    right[n - 1] = env.alpha(b - 1);  // h(b) = 1
    std::vector<double> left(n, 0.0);
    left[0] = env.beta(a + 1);  // g(a) = 1
    RuinTable t;
    t.a = a;
    t.b = b;
    t.hit_b_first = chain.solve(std::move(right));
    t.hit_a_first = chain.solve(std::move(left));
    return t;
}

double ExitTable::at(Index x) const {
    if (x == a || x == b) return 0.0;
    return time[static_cast<std::size_t>(x - a - 1)];
}

ExitTable solve_expected_exit(const Environment& env, Index a, Index b) {
    require_interval(env, a, b);
    const BirthDeath chain = interior(env, a, b);
    ExitTable t;
    t.a = a;
    t.b = b;
    t.time = chain.solve(std::vector<double>(chain.size(), 1.0));
    return t;
}

VisitTable solve_expected_visits(const Environment& env, Index m, Index radius, double tolerance) {
    if (radius < 1) throw Error(ErrorCode::ConfigError, "radius must be at least 1");
    if (m - radius - 1 < env.lo() || m + radius + 1 > env.hi()) {
        throw Error(ErrorCode::InvalidWindow, "visit radius leaves the environment window");
    }
    VisitTable t;
    t.m = m;
    t.radius = radius;
    const auto right = converged_half(env, m, +1, radius, tolerance, t.solved_right);
    const auto left = converged_half(env, m, -1, radius, tolerance, t.solved_left);
    t.visits.assign(static_cast<std::size_t>(2 * radius + 1), 0.0);
    for (Index j = 1; j <= radius; ++j) {
        t.visits[static_cast<std::size_t>(radius + j)] = right[static_cast<std::size_t>(j - 1)];
        t.visits[static_cast<std::size_t>(radius - j)] = left[static_cast<std::size_t>(j - 1)];
    }
    t.visits[static_cast<std::size_t>(radius)] = 1.0;
    return t;
}

}  // namespace sinai::oracle
