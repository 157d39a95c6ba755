#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <set>
#include <thread>

#include "sinai/analysis.hpp"
#include "sinai/error.hpp"
#include "sinai/exact.hpp"
#include "sinai/stats.hpp"
#include "sinai/walk.hpp"

namespace sinai {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::uint64_t kEnvTag = 0x656e7669726f6eULL;
constexpr std::uint64_t kWalkTag = 0x77616c6bULL;
constexpr std::uint64_t kBootTag = 0x626f6f74ULL;

double log2n(std::int64_t n) { return iterated_log(static_cast<double>(n), 2); }

struct Prepared {
    std::int64_t n = 0;
    Scales scales;
};

struct Located {
    Environment env;
    Potential pot;
    BasicValley valley;
};

// Either fills `out` or returns the failure status.
TrialStatus locate(const ExperimentConfig& c, const Prepared& pr, Seed seed,
                   std::optional<Located>& out) {
    SampledValley sv = sample_valley(c.distribution, seed, pr.scales, c.cap);
    if (sv.status != TrialStatus::Ok) return sv.status;
    out.emplace(Located{std::move(*sv.env), std::move(*sv.potential), *sv.valley});
    return TrialStatus::Ok;
}

std::optional<WalkResult> walk_from_origin(const ExperimentConfig& c, const Located& loc,
                                           std::int64_t n, std::int64_t trial, SiteRange tracked) {
    Stream stream = walk_stream(c.seed, trial, n);
    try {
        return run_walk(loc.env, 0, n, stream, tracked);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::WindowExit) throw;
        return std::nullopt;
    }
}

exact::Region basin(const BasicValley& v) { return {v.Mn_prime, v.Mn}; }

void trial_concentration(const ExperimentConfig& c, const Prepared& pr, TrialRecord& rec,
                         const Located& loc) {
    const std::int64_t f = pr.scales.f_p;
    const SiteRange F{loc.valley.mn - f, loc.valley.mn + f};
    const auto walk = walk_from_origin(c, loc, pr.n, rec.trial, F);
    if (!walk) { rec.status = TrialStatus::WindowExit; return; }
    const double ratio = static_cast<double>(walk->tracked) / static_cast<double>(pr.n);
    const double threshold = 1.0 - std::pow(static_cast<double>(f), -c.rho / 2.0);
    rec.values = {{"f_p", static_cast<double>(f)},
                  {"xi_F", static_cast<double>(walk->tracked)},
                  {"ratio", ratio},
                  {"threshold", threshold},
                  {"event", ratio >= threshold ? 1.0 : 0.0}};
}

void trial_radius(const ExperimentConfig& c, const Prepared& pr, TrialRecord& rec,
                  const Located& loc) {
    const auto walk = walk_from_origin(c, loc, pr.n, rec.trial, {});
    if (!walk) { rec.status = TrialStatus::WindowExit; return; }
    const auto y = static_cast<double>(concentration_radius(walk->profile));
    const double theta = c.theta(pr.n);
    rec.values = {{"Y_n", y}, {"theta", theta}, {"success", y <= theta ? 1.0 : 0.0}};
}

void trial_lln(const ExperimentConfig& c, const Prepared& pr, TrialRecord& rec, const Located& loc) {
    const auto walk = walk_from_origin(c, loc, pr.n, rec.trial, {});
    if (!walk) { rec.status = TrialStatus::WindowExit; return; }
    const exact::Region W = basin(loc.valley);
    const double nd = static_cast<double>(pr.n);
    auto deviation = [&](Index k) {
        const double occ = exact::expected_occupation(loc.pot, loc.env, W, k);
        return std::abs(static_cast<double>(walk->profile.count(k)) / nd - 1.0 / occ);
    };
    const Index m = loc.valley.mn;
    const double occ = exact::expected_occupation(loc.pot, loc.env, W, m);
    const double d = deviation(m);
    const double cut = 1.0 / (log2n(pr.n) * log2n(pr.n));
    rec.values = {{"xi_m", static_cast<double>(walk->profile.count(m))},
                  {"occupation", occ},
                  {"D", d},
                  {"small", d <= cut ? 1.0 : 0.0}};
    if (c.neighbors) {
        const auto ell = static_cast<Index>(std::floor(
            iterated_log(nd, 3) / std::log((1.0 - loc.env.eta0()) / loc.env.eta0())));
        const Index half = std::max<Index>(ell, 0);
        double worst = 0.0;
        for (Index k = std::max(m - half, W.lo); k <= std::min(m + half, W.hi); ++k) {
            worst = std::max(worst, deviation(k));
        }
        rec.values.emplace_back("ell", static_cast<double>(half));
        rec.values.emplace_back("D_neighbors_max", worst);
    }
}

void trial_env_stats(const ExperimentConfig& c, const Prepared& pr, TrialRecord& rec,
                     const Located& loc) {
    const BasicValley& v = loc.valley;
    const exact::Region W = basin(v);
    const auto terms = exact::expected_local_times(loc.pot, loc.env, W, v.mn);
    double total = 0.0;
    double inside = 0.0;
    for (Index k = W.lo; k <= W.hi; ++k) {
        const double t = terms[static_cast<std::size_t>(k - W.lo)];
        total += t;
        if (std::llabs(k - v.mn) <= pr.scales.f_p) inside += t;
    }
    const double outside = total - inside;
    const double bound = 2.0 / (loc.env.eta0() * static_cast<double>(pr.scales.f_p + 1));
    const double c1_ratio = inside / iterated_log(static_cast<double>(pr.n), c.p + 1);
    rec.values = {{"width", static_cast<double>(v.Mn - v.Mn_prime + 1)},
                  {"occupation", total},
                  {"occupation_F", inside},
                  {"occupation_outside", outside},
                  {"c1_ratio", c1_ratio},
                  {"outside_bound", bound},
                  {"outside_violation", outside > bound ? 1.0 : 0.0}};
    if (v.mn > 0) {
        double match = 0.0;
        try {
            match = locate_mn_via_ladder(loc.pot, v.Gamma_n) == v.mn ? 1.0 : 0.0;
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NotFound) throw;
        }
        rec.values.emplace_back("ladder_match", match);
    }
}

void trial_favorites(const ExperimentConfig& c, const Prepared& pr, TrialRecord& rec,
                     const Located& loc) {
    const auto walk = walk_from_origin(c, loc, pr.n, rec.trial, {});
    if (!walk) { rec.status = TrialStatus::WindowExit; return; }
    const FavoriteSites fav = favorite_sites(walk->profile);
    const Index m = loc.valley.mn;
    const std::int64_t f = pr.scales.f_p;
    const bool contained = std::all_of(fav.sites.begin(), fav.sites.end(),
                                       [&](Index k) { return std::llabs(k - m) <= f; });
    const exact::Region W = basin(loc.valley);
    const auto theta = static_cast<Index>(std::floor(c.theta(pr.n)));
    double best = 0.0;
    for (Index k = std::max(m - theta, W.lo); k <= std::min(m + theta, W.hi); ++k) {
        best = std::max(best, 1.0 / exact::expected_occupation(loc.pot, loc.env, W, k));
    }
    const double ratio = static_cast<double>(fav.xi_star) / static_cast<double>(pr.n);
    rec.favorites = fav.sites;
    rec.values = {{"xi_star", static_cast<double>(fav.xi_star)},
                  {"contained", contained ? 1.0 : 0.0},
                  {"theta", static_cast<double>(theta)},
                  {"gap", std::abs(ratio - best)}};
}

TrialRecord run_trial(const ExperimentConfig& c, const Prepared& pr, std::int64_t trial) {
    TrialRecord rec;
    rec.n = pr.n;
    rec.trial = trial;
    rec.env_seed = environment_seed(c.seed, trial);
    std::optional<Located> loc;
    rec.status = locate(c, pr, rec.env_seed, loc);
    if (rec.status != TrialStatus::Ok) return rec;
    rec.valley = loc->valley;
    switch (c.kind) {
        case ExperimentKind::Concentration: trial_concentration(c, pr, rec, *loc); break;
        case ExperimentKind::Radius: trial_radius(c, pr, rec, *loc); break;
        case ExperimentKind::Lln: trial_lln(c, pr, rec, *loc); break;
        case ExperimentKind::EnvStats: trial_env_stats(c, pr, rec, *loc); break;
        case ExperimentKind::Favorites: trial_favorites(c, pr, rec, *loc); break;
    }
    return rec;
}

// Runs fn(i) for i in [0, count) on `workers` threads; the first exception wins.
template <typename Fn>
void parallel_for(std::size_t count, int workers, Fn&& fn) {
    const auto threads = static_cast<std::size_t>(std::clamp<std::int64_t>(
        workers, 1, static_cast<std::int64_t>(std::max<std::size_t>(count, 1))));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto body = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(count);
                return;
            }
        }
    };
    if (threads == 1) {
        body();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(body);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);
}

ExperimentResult run_kind(const ExperimentConfig& config, ExperimentKind kind) {
    ExperimentConfig c = config;
    c.kind = kind;
    const auto problems = validate(c);
    if (!problems.empty()) {
        std::string msg = "invalid experiment config:";
        for (const auto& p : problems) msg += "\n  " + p;
        throw Error(ErrorCode::ConfigError, msg);
    }
    const HypothesisReport h = validate_distribution(c.distribution);
    std::vector<Prepared> grid;
    for (std::int64_t n : c.n_grid) {
        grid.push_back({n, compute_scales(n, c.p, c.gamma, std::sqrt(h.sigma2), h.ie)});
    }
    const std::int64_t per_n = kind == ExperimentKind::EnvStats ? c.environments : c.trials;
    const std::size_t total = grid.size() * static_cast<std::size_t>(per_n);

    ExperimentResult result;
    result.config = c;
    result.records.resize(total);
    parallel_for(total, c.workers, [&](std::size_t i) {
        const auto& pr = grid[i / static_cast<std::size_t>(per_n)];
        const auto trial = static_cast<std::int64_t>(i % static_cast<std::size_t>(per_n));
        result.records[i] = run_trial(c, pr, trial);
    });
    result.aggregates = compute_aggregates(c, result.records);
    result.failures = count_failures(result.records);
    return result;
}

std::vector<double> collect(const std::vector<const TrialRecord*>& recs, const std::string& key) {
    std::vector<double> out;
    for (const auto* r : recs) {
        if (auto v = r->value(key)) out.push_back(*v);
    }
    return out;
}

double frequency(const std::vector<double>& flags) {
    if (flags.empty()) return kNaN;
    double s = 0.0;
    for (double f : flags) s += f;
    return s / static_cast<double>(flags.size());
}

void add_median_ci(NAggregate& agg, const std::vector<double>& xs, const std::string& name,
                   const ExperimentConfig& c) {
    if (xs.empty()) {
        agg.values.emplace_back("median_" + name, kNaN);
        agg.values.emplace_back("median_" + name + "_ci_lo", kNaN);
        agg.values.emplace_back("median_" + name + "_ci_hi", kNaN);
        return;
    }
    const auto ci = stats::bootstrap_median_ci(
        xs, 0.95, c.bootstrap, derive_seed(c.seed, {kBootTag, static_cast<std::uint64_t>(agg.n)}));
    agg.values.emplace_back("median_" + name, stats::median(xs));
    agg.values.emplace_back("median_" + name + "_ci_lo", ci.lo);
    agg.values.emplace_back("median_" + name + "_ci_hi", ci.hi);
}

void add_frequency(NAggregate& agg, const std::vector<double>& flags, const std::string& name) {
    agg.values.emplace_back(name + "_frequency", frequency(flags));
    if (flags.empty()) {
        agg.values.emplace_back(name + "_ci_lo", kNaN);
        agg.values.emplace_back(name + "_ci_hi", kNaN);
        return;
    }
    std::int64_t hits = 0;
    for (double f : flags) hits += f != 0.0 ? 1 : 0;
    const auto ci = stats::wilson_interval(hits, static_cast<std::int64_t>(flags.size()));
    agg.values.emplace_back(name + "_ci_lo", ci.lo);
    agg.values.emplace_back(name + "_ci_hi", ci.hi);
}

}  // namespace

std::string to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::Concentration: return "concentration";
        case ExperimentKind::Radius: return "radius";
        case ExperimentKind::Lln: return "lln";
        case ExperimentKind::EnvStats: return "env-stats";
        case ExperimentKind::Favorites: return "favorites";
    }
    return "unknown";
}

std::optional<ExperimentKind> parse_experiment_kind(const std::string& name) {
    for (auto k : {ExperimentKind::Concentration, ExperimentKind::Radius, ExperimentKind::Lln,
                   ExperimentKind::EnvStats, ExperimentKind::Favorites}) {
        if (to_string(k) == name) return k;
    }
    return std::nullopt;
}

std::string to_string(TrialStatus status) {
    switch (status) {
        case TrialStatus::Ok: return "Ok";
        case TrialStatus::NoValley: return "NoValley";
        case TrialStatus::WindowExit: return "WindowExit";
        case TrialStatus::Capped: return "Capped";
    }
    return "unknown";
}

double ThetaSpec::operator()(std::int64_t n) const {
    if (preset == "log2-squared") return log2n(n) * log2n(n);
    if (preset == "log2") return log2n(n);
    if (preset == "constant") return value;
    if (preset == "table") {
        const auto it = table.find(n);
        if (it == table.end()) {
            throw Error(ErrorCode::ConfigError, "theta table has no entry for n = " + std::to_string(n));
        }
        return it->second;
    }
    throw Error(ErrorCode::ConfigError, "unknown theta preset '" + preset + "'");
}

std::vector<std::string> validate(const ExperimentConfig& c) {
    std::vector<std::string> out;
    if (c.n_grid.empty()) out.push_back("n_grid must not be empty");
    std::set<std::int64_t> seen;
    for (std::int64_t n : c.n_grid) {
        if (!seen.insert(n).second) out.push_back("n_grid repeats " + std::to_string(n));
        try {
            compute_scales(n, c.p, c.gamma);
        } catch (const Error& e) {
            out.push_back("n = " + std::to_string(n) + ": " + e.what());
        }
    }
    if (c.p < 2) out.push_back("p must be at least 2");
    if (!(c.gamma > 0.0)) out.push_back("gamma must be positive");
    if (!(c.rho > 0.0 && c.rho < 2.0)) out.push_back("rho must lie in (0, 2)");
    if (c.kind == ExperimentKind::EnvStats) {
        if (c.environments < 1) out.push_back("environments must be at least 1");
    } else if (c.trials < 1) {
        out.push_back("trials must be at least 1");
    }
    if (c.cap < 1) out.push_back("cap must be at least 1");
    if (c.c1 && !(*c.c1 > 0.0)) out.push_back("c1 must be positive");
    if (c.bootstrap < 1) out.push_back("bootstrap must be at least 1");
    if (c.workers < 1) out.push_back("workers must be at least 1");
    const std::set<std::string> presets{"log2-squared", "log2", "constant", "table"};
    if (!presets.count(c.theta.preset)) {
        out.push_back("unknown theta preset '" + c.theta.preset + "'");
    } else if (c.theta.preset == "table") {
        for (std::int64_t n : c.n_grid) {
            if (!c.theta.table.count(n)) out.push_back("theta table misses n = " + std::to_string(n));
        }
    } else if (c.theta.preset == "constant" && !(c.theta.value >= 0.0)) {
        out.push_back("theta constant must be non-negative");
    }
    try {
        const HypothesisReport h = validate_distribution(c.distribution);
        if (!h.ok) out.push_back("distribution violates the walk hypotheses");
    } catch (const Error& e) {
        out.push_back(std::string("distribution: ") + e.what());
    }
    return out;
}

std::optional<double> TrialRecord::value(const std::string& key) const {
    for (const auto& [k, v] : values) {
        if (k == key) return v;
    }
    return std::nullopt;
}

double NAggregate::value(const std::string& key) const {
    for (const auto& [k, v] : values) {
        if (k == key) return v;
    }
    return kNaN;
}

Seed environment_seed(Seed master, std::int64_t trial) {
    return derive_seed(master, {kEnvTag, static_cast<std::uint64_t>(trial)});
}

Stream walk_stream(Seed master, std::int64_t trial, std::int64_t n) {
    return Stream::derive(master, {kWalkTag, static_cast<std::uint64_t>(trial),
                                   static_cast<std::uint64_t>(n)});
}

SampledValley sample_valley(const DistributionSpec& spec, Seed seed, const Scales& scales,
                            std::int64_t cap) {
    const HypothesisReport h = validate_distribution(spec);
    Index radius = std::min<Index>(default_window_radius(scales.Gamma_n, std::sqrt(h.sigma2)), cap);
    for (;;) {
        Environment env = sample_environment(spec, -radius, radius, seed);
        Potential pot = build_potential(env);
        try {
            const BasicValley v = find_basic_valley(pot, scales);
            SampledValley out;
            out.valley = v;
            out.env.emplace(std::move(env));
            out.potential.emplace(std::move(pot));
            return out;
        } catch (const Error& e) {
            if (e.code() == ErrorCode::NoValley) return {TrialStatus::NoValley, {}, {}, {}};
            if (e.code() != ErrorCode::WindowTooNarrow) throw;
        }
        if (radius >= cap) return {TrialStatus::Capped, {}, {}, {}};
        radius = std::min<Index>(2 * radius, cap);
    }
}

std::vector<NAggregate> compute_aggregates(const ExperimentConfig& c,
                                           const std::vector<TrialRecord>& records) {
    std::vector<NAggregate> out;
    for (std::int64_t n : c.n_grid) {
        NAggregate agg;
        agg.n = n;
        std::vector<const TrialRecord*> ok;
        for (const auto& r : records) {
            if (r.n != n) continue;
            ++agg.requested;
            if (r.status == TrialStatus::Ok) ok.push_back(&r);
        }
        agg.ok = static_cast<std::int64_t>(ok.size());
        switch (c.kind) {
            case ExperimentKind::Concentration: {
                const auto ratios = collect(ok, "ratio");
                add_median_ci(agg, ratios, "ratio", c);
                agg.values.emplace_back("mean_ratio", ratios.empty() ? kNaN : stats::mean(ratios));
                add_frequency(agg, collect(ok, "event"), "event");
                break;
            }
            case ExperimentKind::Radius:
                add_median_ci(agg, collect(ok, "Y_n"), "Y_n", c);
                add_frequency(agg, collect(ok, "success"), "success");
                break;
            case ExperimentKind::Lln:
                add_median_ci(agg, collect(ok, "D"), "D", c);
                add_frequency(agg, collect(ok, "small"), "small");
                if (c.neighbors) {
                    const auto worst = collect(ok, "D_neighbors_max");
                    agg.values.emplace_back("median_D_neighbors_max",
                                            worst.empty() ? kNaN : stats::median(worst));
                }
                break;
            case ExperimentKind::EnvStats: {
                const auto occ = collect(ok, "occupation");
                agg.values.emplace_back("mean_occupation", occ.empty() ? kNaN : stats::mean(occ));
                agg.values.emplace_back("min_occupation",
                                        occ.empty() ? kNaN : *std::min_element(occ.begin(), occ.end()));
                agg.values.emplace_back("max_occupation",
                                        occ.empty() ? kNaN : *std::max_element(occ.begin(), occ.end()));
                const auto ratio = collect(ok, "c1_ratio");
                agg.values.emplace_back("c1_ratio_q99", ratio.empty() ? kNaN : stats::quantile(ratio, 0.99));
                agg.values.emplace_back("outside_violation_frequency",
                                        frequency(collect(ok, "outside_violation")));
                agg.values.emplace_back("ladder_match_frequency", frequency(collect(ok, "ladder_match")));
                agg.values.emplace_back("valley_failure_rate",
                                        agg.requested == 0
                                            ? kNaN
                                            : static_cast<double>(agg.requested - agg.ok) /
                                                  static_cast<double>(agg.requested));
                break;
            }
            case ExperimentKind::Favorites:
                add_frequency(agg, collect(ok, "contained"), "contained");
                add_median_ci(agg, collect(ok, "gap"), "gap", c);
                break;
        }
        out.push_back(std::move(agg));
    }
    return out;
}

std::map<std::string, std::int64_t> count_failures(const std::vector<TrialRecord>& records) {
    std::map<std::string, std::int64_t> out{{"NoValley", 0}, {"WindowExit", 0}, {"Capped", 0}};
    for (const auto& r : records) {
        if (r.status != TrialStatus::Ok) ++out[to_string(r.status)];
    }
    return out;
}

ExperimentResult run_experiment(const ExperimentConfig& config) { return run_kind(config, config.kind); }

ExperimentResult run_concentration(const ExperimentConfig& config) {
    return run_kind(config, ExperimentKind::Concentration);
}

ExperimentResult run_concentration_radius(const ExperimentConfig& config) {
    return run_kind(config, ExperimentKind::Radius);
}

ExperimentResult run_local_time_lln(const ExperimentConfig& config) {
    return run_kind(config, ExperimentKind::Lln);
}

ExperimentResult run_env_statistics(const ExperimentConfig& config) {
    return run_kind(config, ExperimentKind::EnvStats);
}

ExperimentResult run_favorites(const ExperimentConfig& config) {
    return run_kind(config, ExperimentKind::Favorites);
}

}  // namespace sinai
