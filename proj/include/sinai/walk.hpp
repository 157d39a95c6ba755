#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "sinai/environment.hpp"
#include "sinai/rng.hpp"

namespace sinai {

// Visit counts xi(k, n) = #{1 <= i <= n : X_i = k} for one trajectory, stored
// densely over the visited range.
class LocalTimeProfile {
public:
    LocalTimeProfile() = default;
    LocalTimeProfile(Index first_site, std::vector<std::uint64_t> counts, std::int64_t n,
                     Index start, Index final_position);

    // Builds a profile from (site, count) pairs; n is the total count.
    static LocalTimeProfile from_entries(const std::vector<std::pair<Index, std::uint64_t>>& entries,
                                         Index start = 0, Index final_position = 0);

    std::int64_t steps() const noexcept { return n_; }
    Index start() const noexcept { return start_; }
    Index final_position() const noexcept { return final_; }
    Index first_site() const noexcept { return first_; }
    Index last_site() const noexcept { return first_ + static_cast<Index>(counts_.size()) - 1; }
    bool empty() const noexcept { return counts_.empty(); }

    std::uint64_t count(Index k) const noexcept;
    // xi([a, b], n); zero for an empty or disjoint range.
    std::uint64_t sum(Index a, Index b) const noexcept;
    const std::vector<std::uint64_t>& dense() const noexcept { return counts_; }
    std::vector<std::pair<Index, std::uint64_t>> entries() const;

private:
    Index first_ = 0;
    std::vector<std::uint64_t> counts_;
    std::int64_t n_ = 0;
    Index start_ = 0;
    Index final_ = 0;
};

// Closed index range used to accumulate xi(V, n) directly inside the walk loop.
struct SiteRange {
    Index lo = 0;
    Index hi = -1;
    bool contains(Index k) const noexcept { return k >= lo && k <= hi; }
};

struct WalkResult {
    LocalTimeProfile profile;
    std::uint64_t tracked = 0;  // visits to the tracked range, counted per step
};

// n steps of the quenched chain from `start`. Throws Error(WindowExit) when the
// walk touches either end of the environment window.
WalkResult run_walk(const Environment& env, Index start, std::int64_t n, Stream& stream,
                    SiteRange tracked = {});

struct HittingResult {
    bool hit = false;
    std::int64_t steps = 0;  // first k >= 1 with X_k = target, or the cap when !hit
};

HittingResult hitting_time(const Environment& env, Index start, Index target, std::int64_t cap,
                           Stream& stream);

// Visit counts over times 1..T_m of one excursion from m back to m.
struct ExcursionSample {
    Index first_site = 0;
    std::vector<std::uint32_t> counts;
    std::int64_t length = 0;

    std::uint32_t count(Index k) const noexcept;
};

// Excursions that hit the cap or touch the window ends are tallied apart and
// carry no sample.
struct ExcursionBatch {
    std::vector<ExcursionSample> samples;
    std::int64_t capped = 0;
    std::int64_t exited = 0;
};

ExcursionBatch sample_excursions(const Environment& env, Index m, std::int64_t count,
                                 std::int64_t cap, Stream& stream);

// xi(x, T_a ^ T_b) under P_x, with a < x < b inside the window.
std::uint64_t local_time_before_exit(const Environment& env, Index x, Index a, Index b,
                                     Stream& stream);

// Smallest k >= 0 such that some window [x-k, x+k] holds strictly more than
// half of the profile's steps.
std::int64_t concentration_radius(const LocalTimeProfile& profile);

struct FavoriteSites {
    std::vector<Index> sites;
    std::uint64_t xi_star = 0;
};

FavoriteSites favorite_sites(const LocalTimeProfile& profile);

}  // namespace sinai
