#include "sinai/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sinai/error.hpp"

namespace sinai::stats {

namespace {

void require_nonempty(std::span<const double> xs) {
    if (xs.empty()) throw Error(ErrorCode::ConfigError, "statistic of an empty sample");
}

double sorted_median(const std::vector<double>& v) {
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

double mean(std::span<const double> xs) {
    require_nonempty(xs);
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double variance(std::span<const double> xs) {
    if (xs.size() < 2) return 0.0;
    const double mu = mean(xs);
    double acc = 0.0;
    for (double x : xs) acc += (x - mu) * (x - mu);
    return acc / static_cast<double>(xs.size() - 1);
}

double standard_error(std::span<const double> xs) {
    require_nonempty(xs);
    return std::sqrt(variance(xs) / static_cast<double>(xs.size()));
}

double median(std::span<const double> xs) {
    require_nonempty(xs);
    std::vector<double> v(xs.begin(), xs.end());
    std::sort(v.begin(), v.end());
    return sorted_median(v);
}

double quantile(std::span<const double> xs, double q) {
    require_nonempty(xs);
    if (!(q >= 0.0 && q <= 1.0)) throw Error(ErrorCode::ConfigError, "quantile level outside [0,1]");
    std::vector<double> v(xs.begin(), xs.end());
    std::sort(v.begin(), v.end());
    const double h = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

Interval bootstrap_median_ci(std::span<const double> xs, double level, int resamples, Seed seed) {
    require_nonempty(xs);
    if (resamples < 1) throw Error(ErrorCode::ConfigError, "bootstrap needs at least one resample");
    Stream rng(seed);
    const std::size_t n = xs.size();
    std::vector<double> draw(n);
    std::vector<double> medians(static_cast<std::size_t>(resamples));
    for (auto& out : medians) {
        for (auto& d : draw) d = xs[rng.below(n)];
        std::sort(draw.begin(), draw.end());
        out = sorted_median(draw);
    }
    const double tail = 0.5 * (1.0 - level);
    return {quantile(medians, tail), quantile(medians, 1.0 - tail)};
}

Interval wilson_interval(std::int64_t successes, std::int64_t trials, double z) {
    if (trials < 1) throw Error(ErrorCode::ConfigError, "Wilson interval needs at least one trial");
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / (1.0 + z2 / n);
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

}  // namespace sinai::stats
