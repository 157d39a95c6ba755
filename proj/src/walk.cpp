#include "sinai/walk.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "sinai/error.hpp"

namespace sinai {

namespace {

// P[step right] as a 64-bit threshold: a draw u moves right iff u < threshold.
std::vector<std::uint64_t> step_thresholds(const Environment& env) {
    std::vector<std::uint64_t> thr(env.size());
    const auto alphas = env.alphas();
    for (std::size_t i = 0; i < thr.size(); ++i) {
        thr[i] = static_cast<std::uint64_t>(std::ldexp(alphas[i], 64));
    }
    return thr;
}

[[noreturn]] void window_exit(const Environment& env, Index at) {
    throw Error(ErrorCode::WindowExit, "walk reached site " + std::to_string(at) +
                                           " at the end of window [" + std::to_string(env.lo()) +
                                           ", " + std::to_string(env.hi()) + "]");
}

void require_interior(const Environment& env, Index k, const char* what) {
    if (k <= env.lo() || k >= env.hi()) {
        throw Error(ErrorCode::InvalidWindow, std::string(what) + " " + std::to_string(k) +
                                                  " is not strictly inside the window");
    }
}

}  // namespace

LocalTimeProfile::LocalTimeProfile(Index first_site, std::vector<std::uint64_t> counts,
                                   std::int64_t n, Index start, Index final_position)
    : first_(first_site), counts_(std::move(counts)), n_(n), start_(start), final_(final_position) {}

LocalTimeProfile LocalTimeProfile::from_entries(
    const std::vector<std::pair<Index, std::uint64_t>>& entries, Index start, Index final_position) {
    if (entries.empty()) return LocalTimeProfile(0, {}, 0, start, final_position);
    Index lo = entries.front().first;
    Index hi = lo;
    for (const auto& [k, c] : entries) {
        lo = std::min(lo, k);
        hi = std::max(hi, k);
    }
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(hi - lo + 1), 0);
    std::int64_t n = 0;
    for (const auto& [k, c] : entries) {
        counts[static_cast<std::size_t>(k - lo)] += c;
        n += static_cast<std::int64_t>(c);
    }
    return LocalTimeProfile(lo, std::move(counts), n, start, final_position);
}

std::uint64_t LocalTimeProfile::count(Index k) const noexcept {
    if (k < first_ || k > last_site()) return 0;
    return counts_[static_cast<std::size_t>(k - first_)];
}

std::uint64_t LocalTimeProfile::sum(Index a, Index b) const noexcept {
    const Index lo = std::max(a, first_);
    const Index hi = std::min(b, last_site());
    if (lo > hi) return 0;
    return std::accumulate(counts_.begin() + (lo - first_), counts_.begin() + (hi - first_) + 1,
                           std::uint64_t{0});
}

std::vector<std::pair<Index, std::uint64_t>> LocalTimeProfile::entries() const {
    std::vector<std::pair<Index, std::uint64_t>> out;
    for (std::size_t i = 0; i < counts_.size(); ++i) {
        if (counts_[i] != 0) out.emplace_back(first_ + static_cast<Index>(i), counts_[i]);
    }
    return out;
}

WalkResult run_walk(const Environment& env, Index start, std::int64_t n, Stream& stream,
                    SiteRange tracked) {
    require_interior(env, start, "start");
    if (n < 1) throw Error(ErrorCode::ConfigError, "walk length must be at least 1");

    const auto thr = step_thresholds(env);
    std::vector<std::uint64_t> counts(env.size(), 0);
    const std::size_t last = env.size() - 1;
    std::size_t pos = env.offset(start);
    std::size_t lowest = pos;
    std::size_t highest = pos;
    const std::size_t track_lo = tracked.lo <= tracked.hi
                                     ? static_cast<std::size_t>(std::clamp(tracked.lo - env.lo(), Index{0}, static_cast<Index>(last)))
                                     : 1;
    const std::size_t track_hi = tracked.lo <= tracked.hi
                                     ? static_cast<std::size_t>(std::clamp(tracked.hi - env.lo(), Index{0}, static_cast<Index>(last)))
                                     : 0;
    const bool track_any = tracked.lo <= tracked.hi && tracked.hi >= env.lo() && tracked.lo <= env.hi();
    std::uint64_t inside = 0;

    for (std::int64_t i = 0; i < n; ++i) {
        pos = stream.next() < thr[pos] ? pos + 1 : pos - 1;
        if (pos == 0 || pos == last) window_exit(env, env.lo() + static_cast<Index>(pos));
        ++counts[pos];
        lowest = std::min(lowest, pos);
        highest = std::max(highest, pos);
        if (track_any && pos >= track_lo && pos <= track_hi) ++inside;
    }

    // The start site may be unvisited; trim to the range of X_1..X_n.
    while (counts[lowest] == 0) ++lowest;
    while (counts[highest] == 0) --highest;
    std::vector<std::uint64_t> dense(counts.begin() + static_cast<std::ptrdiff_t>(lowest),
                                     counts.begin() + static_cast<std::ptrdiff_t>(highest) + 1);
    WalkResult result;
    result.profile = LocalTimeProfile(env.lo() + static_cast<Index>(lowest), std::move(dense), n,
                                      start, env.lo() + static_cast<Index>(pos));
    result.tracked = inside;
    return result;
}

HittingResult hitting_time(const Environment& env, Index start, Index target, std::int64_t cap,
                           Stream& stream) {
    require_interior(env, start, "start");
    if (!env.contains(target)) {
        throw Error(ErrorCode::InvalidWindow, "target " + std::to_string(target) + " outside window");
    }
    if (cap < 1) throw Error(ErrorCode::ConfigError, "cap must be at least 1");
    const auto thr = step_thresholds(env);
    const std::size_t last = env.size() - 1;
    const std::size_t goal = env.offset(target);
    std::size_t pos = env.offset(start);
    for (std::int64_t k = 1; k <= cap; ++k) {
        pos = stream.next() < thr[pos] ? pos + 1 : pos - 1;
        if (pos == goal) return {true, k};
        if (pos == 0 || pos == last) window_exit(env, env.lo() + static_cast<Index>(pos));
    }
    return {false, cap};
}

std::uint32_t ExcursionSample::count(Index k) const noexcept {
    if (k < first_site || k >= first_site + static_cast<Index>(counts.size())) return 0;
    return counts[static_cast<std::size_t>(k - first_site)];
}

ExcursionBatch sample_excursions(const Environment& env, Index m, std::int64_t count,
                                 std::int64_t cap, Stream& stream) {
    require_interior(env, m, "excursion site");
    if (cap < 2) throw Error(ErrorCode::ConfigError, "cap must be at least 2");
    const auto thr = step_thresholds(env);
    const std::size_t last = env.size() - 1;
    const std::size_t home = env.offset(m);
    std::vector<std::uint32_t> scratch(env.size(), 0);

    ExcursionBatch batch;
    batch.samples.reserve(static_cast<std::size_t>(std::max<std::int64_t>(count, 0)));
    for (std::int64_t e = 0; e < count; ++e) {
        std::size_t pos = home;
        std::size_t lowest = home;
        std::size_t highest = home;
        std::int64_t steps = 0;
        bool exited = false;
        do {
            pos = stream.next() < thr[pos] ? pos + 1 : pos - 1;
            ++steps;
            ++scratch[pos];
            lowest = std::min(lowest, pos);
            highest = std::max(highest, pos);
            if (pos == 0 || pos == last) { exited = true; break; }
        } while (pos != home && steps < cap);

        if (exited) {
            ++batch.exited;
        } else if (pos != home) {
            ++batch.capped;
        } else {
            ExcursionSample s;
            s.first_site = env.lo() + static_cast<Index>(lowest);
            s.counts.assign(scratch.begin() + static_cast<std::ptrdiff_t>(lowest),
                            scratch.begin() + static_cast<std::ptrdiff_t>(highest) + 1);
            s.length = steps;
            batch.samples.push_back(std::move(s));
        }
        std::fill(scratch.begin() + static_cast<std::ptrdiff_t>(lowest),
                  scratch.begin() + static_cast<std::ptrdiff_t>(highest) + 1, 0u);
    }
    return batch;
}

std::uint64_t local_time_before_exit(const Environment& env, Index x, Index a, Index b,
                                     Stream& stream) {
    if (!(a < x && x < b) || !env.contains(a) || !env.contains(b)) {
        throw Error(ErrorCode::DegenerateInterval, "need a < x < b inside the window");
    }
    const auto thr = step_thresholds(env);
    const std::size_t lo = env.offset(a);
    const std::size_t hi = env.offset(b);
    const std::size_t home = env.offset(x);
    std::size_t pos = home;
    std::uint64_t visits = 0;
    for (;;) {
        pos = stream.next() < thr[pos] ? pos + 1 : pos - 1;
        if (pos == lo || pos == hi) return visits;
        if (pos == home) ++visits;
    }
}

std::int64_t concentration_radius(const LocalTimeProfile& profile) {
    const auto& c = profile.dense();
    if (c.empty()) throw Error(ErrorCode::ConfigError, "empty profile");
    const std::uint64_t total = std::accumulate(c.begin(), c.end(), std::uint64_t{0});
    std::vector<std::uint64_t> prefix(c.size() + 1, 0);
    std::partial_sum(c.begin(), c.end(), prefix.begin() + 1);

    // Best sum over any 2k+1 consecutive sites; windows overhanging the
    // visited range only lose zeros.
    auto best_window = [&](std::int64_t k) {
        const auto width = static_cast<std::size_t>(2 * k + 1);
        if (width >= c.size()) return total;
        std::uint64_t best = 0;
        for (std::size_t i = 0; i + width <= c.size(); ++i) {
            best = std::max(best, prefix[i + width] - prefix[i]);
        }
        return best;
    };
    // 2 * sum > total encodes the strict inequality sum > n/2 exactly.
    std::int64_t lo = 0;
    std::int64_t hi = static_cast<std::int64_t>(c.size());
    while (lo < hi) {
        const std::int64_t mid = lo + (hi - lo) / 2;
        if (2 * best_window(mid) > total) hi = mid;
        else lo = mid + 1;
    }
    return lo;
}

FavoriteSites favorite_sites(const LocalTimeProfile& profile) {
    FavoriteSites out;
    const auto& c = profile.dense();
    for (std::size_t i = 0; i < c.size(); ++i) {
        const Index site = profile.first_site() + static_cast<Index>(i);
        if (c[i] > out.xi_star) {
            out.xi_star = c[i];
            out.sites.assign(1, site);
        } else if (c[i] == out.xi_star && c[i] > 0) {
            out.sites.push_back(site);
        }
    }
    return out;
}

}  // namespace sinai
