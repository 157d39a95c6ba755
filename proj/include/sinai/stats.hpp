#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sinai/rng.hpp"

namespace sinai::stats {

double mean(std::span<const double> xs);
// Unbiased sample variance; zero for fewer than two values.
double variance(std::span<const double> xs);
double standard_error(std::span<const double> xs);

// Median with the usual midpoint rule for even sizes. Throws on empty input.
double median(std::span<const double> xs);

// Linear-interpolation quantile (type 7), q in [0, 1].
double quantile(std::span<const double> xs, double q);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool contains(double v) const noexcept { return v >= lo && v <= hi; }
};

// Percentile bootstrap interval for the median, deterministic in `seed`.
Interval bootstrap_median_ci(std::span<const double> xs, double level, int resamples, Seed seed);

// Wilson score interval for a binomial proportion.
Interval wilson_interval(std::int64_t successes, std::int64_t trials, double z = 1.959963984540054);

}  // namespace sinai::stats
