#include "sinai/environment.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <type_traits>

#include "sinai/error.hpp"

namespace sinai {

namespace {

constexpr double kWeightTolerance = 1e-12;

void require_probability(double v, const char* what) {
    if (!(v > 0.0 && v < 1.0)) {
        throw Error(ErrorCode::MalformedSpec, std::string(what) + " must lie in (0,1), got " +
                                                  std::to_string(v));
    }
}

// Composite Simpson rule; the integrand is smooth on the closed interval.
template <typename F>
double simpson(F&& f, double a, double b, int panels) {
    const double h = (b - a) / panels;
    double acc = f(a) + f(b);
    for (int i = 1; i < panels; ++i) {
        acc += f(a + i * h) * ((i % 2) ? 4.0 : 2.0);
    }
    return acc * h / 3.0;
}

struct Moments {
    double eta0;
    double mean;
    double variance;
};

Moments moments_of(const TwoPointSymmetric& d) {
    require_probability(d.a, "two-point value");
    const double e1 = increment(d.a);
    const double e2 = increment(1.0 - d.a);
    const double mean = 0.5 * (e1 + e2);
    const double var = 0.5 * ((e1 - mean) * (e1 - mean) + (e2 - mean) * (e2 - mean));
    return {std::min(d.a, 1.0 - d.a), mean, var};
}

Moments moments_of(const UniformSymmetric& d) {
    if (!(d.lo > 0.0 && d.lo < 0.5)) {
        throw Error(ErrorCode::MalformedSpec, "uniform lower end must lie in (0, 1/2)");
    }
    const double a = d.lo;
    const double b = 1.0 - d.lo;
    const double width = b - a;
    const int panels = 200000;
    const double mean = simpson([](double x) { return increment(x); }, a, b, panels) / width;
    const double second =
        simpson([](double x) { double e = increment(x); return e * e; }, a, b, panels) / width;
    return {a, mean, second - mean * mean};
}

Moments moments_of(const FiniteSupport& d) {
    if (d.atoms.empty()) {
        throw Error(ErrorCode::MalformedSpec, "finite support needs at least one atom");
    }
    double total = 0.0;
    double eta0 = 0.5;
    for (const auto& [value, weight] : d.atoms) {
        require_probability(value, "support value");
        if (!(weight > 0.0 && weight <= 1.0)) {
            throw Error(ErrorCode::MalformedSpec, "atom probability must lie in (0,1]");
        }
        total += weight;
        eta0 = std::min({eta0, value, 1.0 - value});
    }
    if (std::abs(total - 1.0) > kWeightTolerance) {
        throw Error(ErrorCode::MalformedSpec,
                    "atom probabilities sum to " + std::to_string(total) + ", not 1");
    }
    double mean = 0.0;
    for (const auto& [value, weight] : d.atoms) mean += weight * increment(value);
    double var = 0.0;
    for (const auto& [value, weight] : d.atoms) {
        const double dev = increment(value) - mean;
        var += weight * dev * dev;
    }
    return {eta0, mean, var};
}

}  // namespace

double increment(double alpha) { return std::log((1.0 - alpha) / alpha); }

HypothesisReport validate_distribution(const DistributionSpec& spec) {
    const Moments m = std::visit([](const auto& d) { return moments_of(d); }, spec);
    HypothesisReport r;
    r.eta0 = m.eta0;
    r.mean_eps = m.mean;
    r.sigma2 = m.variance;
    r.ie = std::log((1.0 - m.eta0) / m.eta0);
    r.regular = m.eta0 > 0.0 && m.eta0 < 0.5;
    r.mean_zero = std::abs(m.mean) <= kMeanZeroTolerance;
    r.positive_variance = m.variance > 0.0;
    r.ok = r.regular && r.mean_zero && r.positive_variance;
    return r;
}

double sample_alpha(const DistributionSpec& spec, Seed seed, Index index) {
    const double u = to_unit(derive_seed(seed, {0x656e76ULL, static_cast<std::uint64_t>(index)}));
    return std::visit(
        [u](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, TwoPointSymmetric>) {
                return u < 0.5 ? d.a : 1.0 - d.a;
            } else if constexpr (std::is_same_v<T, UniformSymmetric>) {
                return d.lo + (1.0 - 2.0 * d.lo) * u;
            } else {
                double acc = 0.0;
                for (const auto& [value, weight] : d.atoms) {
                    acc += weight;
                    if (u < acc) return value;
                }
                return d.atoms.back().first;
            }
        },
        spec);
}

Environment::Environment(Index lo, std::vector<double> alpha, double eta0, double sigma2,
                         std::string provenance)
    : lo_(lo), alpha_(std::move(alpha)), eta0_(eta0), sigma2_(sigma2),
      provenance_(std::move(provenance)) {
    if (lo_ > 0 || hi() < 0) {
        throw Error(ErrorCode::InvalidWindow, "window [" + std::to_string(lo_) + ", " +
                                                  std::to_string(hi()) + "] must contain 0");
    }
    if (!(eta0_ > 0.0 && eta0_ <= 0.5)) {
        throw Error(ErrorCode::MalformedSpec, "eta0 must lie in (0, 1/2]");
    }
    for (double a : alpha_) {
        if (a < eta0_ || a > 1.0 - eta0_) {
            throw Error(ErrorCode::MalformedSpec,
                        "alpha " + std::to_string(a) + " outside [eta0, 1-eta0]");
        }
    }
}

double Environment::sigma() const { return std::sqrt(sigma2_); }

double Environment::ie() const { return std::log((1.0 - eta0_) / eta0_); }

Environment make_environment(Index lo, std::vector<double> alpha, double sigma2,
                             std::string provenance) {
    double eta0 = 0.5;
    for (double a : alpha) eta0 = std::min({eta0, a, 1.0 - a});
    return Environment(lo, std::move(alpha), eta0, sigma2, std::move(provenance));
}

Environment sample_environment(const DistributionSpec& spec, Index lo, Index hi, Seed seed) {
    if (lo > 0 || hi < 0) {
        throw Error(ErrorCode::InvalidWindow, "window [" + std::to_string(lo) + ", " +
                                                  std::to_string(hi) + "] must contain 0");
    }
    const HypothesisReport report = validate_distribution(spec);
    if (!report.ok) {
        throw Error(ErrorCode::MalformedSpec, "distribution violates the walk hypotheses");
    }
    std::vector<double> alpha(static_cast<std::size_t>(hi - lo + 1));
    for (Index i = lo; i <= hi; ++i) {
        alpha[static_cast<std::size_t>(i - lo)] = sample_alpha(spec, seed, i);
    }
    return Environment(lo, std::move(alpha), report.eta0, report.sigma2, std::to_string(seed));
}

Potential::Potential(Index lo, std::vector<double> values) : lo_(lo), values_(std::move(values)) {
    if (lo_ > 0 || hi() < 0) {
        throw Error(ErrorCode::InvalidWindow, "potential window must contain 0");
    }
    if ((*this)(0) != 0.0) {
        throw Error(ErrorCode::MalformedSpec, "potential must vanish at the origin");
    }
}

Potential Potential::mirrored() const {
    std::vector<double> v(values_.rbegin(), values_.rend());
    return Potential(-hi(), std::move(v));
}

Potential build_potential(const Environment& env) {
    const Index lo = env.lo();
    const Index hi = env.hi();
    std::vector<double> s(env.size());
    auto at = [&](Index k) -> double& { return s[static_cast<std::size_t>(k - lo)]; };
    at(0) = 0.0;
    for (Index k = 1; k <= hi; ++k) at(k) = at(k - 1) + increment(env.alpha(k));
    for (Index k = -1; k >= lo; --k) at(k) = at(k + 1) - increment(env.alpha(k + 1));
    return Potential(lo, std::move(s));
}

double iterated_log(double n, int p) {
    double v = n;
    for (int i = 0; i < p; ++i) v = std::log(v);
    return v;
}

Scales compute_scales(std::int64_t n, int p, double gamma, double sigma, double ie) {
    if (p < 2) throw Error(ErrorCode::ConfigError, "p must be at least 2");
    if (!(gamma > 0.0)) throw Error(ErrorCode::ConfigError, "gamma must be positive");
    if (n <= 3) throw Error(ErrorCode::NTooSmall, "n must exceed 3");
    const double nd = static_cast<double>(n);
    const double logp = iterated_log(nd, p);
    if (!(logp > 1.0)) {
        throw Error(ErrorCode::NTooSmall, "log_" + std::to_string(p) + " n = " +
                                              std::to_string(logp) + " is not above 1");
    }
    Scales s;
    s.n = n;
    s.p = p;
    s.gamma = gamma;
    const double log1 = std::log(nd);
    const double log2 = std::log(log1);
    s.Gamma_n = log1 + gamma * log2;
    const double base = log2 * logp;
    s.f_p = static_cast<std::int64_t>(std::floor(base * base));
    s.R_p = std::sqrt(iterated_log(nd, p + 1)) / std::sqrt(logp);
    const double log3 = iterated_log(nd, 3);
    if (!std::isnan(sigma)) {
        const double root = 4.0 * std::sqrt(3.0) * sigma * static_cast<double>(s.f_p);
        // ((root)^2 log_3 n)^{1/2}; log_3 n can be negative for p = 2 and small n.
        s.log_g1 = std::sqrt(root * root * std::max(log3, 0.0));
        s.g1 = std::exp(s.log_g1);
    }
    if (!std::isnan(ie)) s.ell = log3 / ie;
    return s;
}

Index default_window_radius(double Gamma_n, double sigma) {
    const double r = Gamma_n / sigma;
    return static_cast<Index>(std::ceil(6.0 * r * r));
}

}  // namespace sinai
