#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "sinai/rng.hpp"

namespace sinai {

using Index = std::int64_t;

// ---------------------------------------------------------------------------
// Environment laws
// ---------------------------------------------------------------------------

// alpha is a or 1-a with probability 1/2 each.
struct TwoPointSymmetric {
    double a = 0.25;
};

// alpha uniform on [lo, 1-lo].
struct UniformSymmetric {
    double lo = 0.1;
};

// alpha takes value atoms[i].first with probability atoms[i].second.
struct FiniteSupport {
    std::vector<std::pair<double, double>> atoms;
};

using DistributionSpec = std::variant<TwoPointSymmetric, UniformSymmetric, FiniteSupport>;

// Outcome of checking a law against the three standing hypotheses:
// E[eps] = 0, Var[eps] > 0 and ellipticity alpha in [eta0, 1-eta0].
struct HypothesisReport {
    double eta0 = 0.0;
    double sigma2 = 0.0;
    double ie = 0.0;  // log((1-eta0)/eta0), the bound on |eps|
    double mean_eps = 0.0;
    bool regular = false;
    bool mean_zero = false;
    bool positive_variance = false;
    bool ok = false;
};

inline constexpr double kMeanZeroTolerance = 1e-12;

// Throws Error(MalformedSpec) for values outside (0,1) or weights not summing to 1.
HypothesisReport validate_distribution(const DistributionSpec& spec);

// alpha at site `index` for master seed `seed`; a pure function of (seed, index).
double sample_alpha(const DistributionSpec& spec, Seed seed, Index index);

// ---------------------------------------------------------------------------
// Environment and potential
// ---------------------------------------------------------------------------

class Environment {
public:
    // Validates lo <= 0 <= hi and every alpha in [eta0, 1-eta0].
    Environment(Index lo, std::vector<double> alpha, double eta0, double sigma2,
                std::string provenance);

    Index lo() const noexcept { return lo_; }
    Index hi() const noexcept { return lo_ + static_cast<Index>(alpha_.size()) - 1; }
    std::size_t size() const noexcept { return alpha_.size(); }
    bool contains(Index i) const noexcept { return i >= lo() && i <= hi(); }

    double alpha(Index i) const { return alpha_[offset(i)]; }
    double beta(Index i) const { return 1.0 - alpha_[offset(i)]; }
    std::span<const double> alphas() const noexcept { return alpha_; }

    double eta0() const noexcept { return eta0_; }
    double sigma2() const noexcept { return sigma2_; }
    double sigma() const;
    double ie() const;
    const std::string& provenance() const noexcept { return provenance_; }

    std::size_t offset(Index i) const noexcept { return static_cast<std::size_t>(i - lo_); }

private:
    Index lo_;
    std::vector<double> alpha_;
    double eta0_;
    double sigma2_;
    std::string provenance_;
};

// Builds an environment from hand-chosen alphas; eta0 is the tightest
// ellipticity bound of the given values and sigma2 is supplied by the caller.
Environment make_environment(Index lo, std::vector<double> alpha, double sigma2,
                             std::string provenance = "fixture");

// Throws Error(InvalidWindow) unless lo <= 0 <= hi, Error(MalformedSpec) if the
// law violates the hypotheses.
Environment sample_environment(const DistributionSpec& spec, Index lo, Index hi, Seed seed);

// Random potential on the environment window, natural-log units.
// S_0 = 0 and S_k - S_{k-1} = log(beta_k / alpha_k) for every k in (lo, hi].
class Potential {
public:
    Potential(Index lo, std::vector<double> values);

    Index lo() const noexcept { return lo_; }
    Index hi() const noexcept { return lo_ + static_cast<Index>(values_.size()) - 1; }
    bool contains(Index i) const noexcept { return i >= lo() && i <= hi(); }
    double operator()(Index k) const { return values_[static_cast<std::size_t>(k - lo_)]; }
    std::span<const double> values() const noexcept { return values_; }

    // Same potential seen through x -> -x. Used to derive left-side
    // operations from right-side ones.
    Potential mirrored() const;

private:
    Index lo_;
    std::vector<double> values_;
};

double increment(double alpha);  // log((1-alpha)/alpha)

Potential build_potential(const Environment& env);

// ---------------------------------------------------------------------------
// Scale functions
// ---------------------------------------------------------------------------

// p-fold iterated natural log; log_1 n = ln n.
double iterated_log(double n, int p);

struct Scales {
    std::int64_t n = 0;
    int p = 2;
    double gamma = 0.0;
    double Gamma_n = 0.0;  // ln n + gamma ln ln n
    std::int64_t f_p = 0;  // floor((ln ln n * log_p n)^2)
    double R_p = 0.0;      // (log_{p+1} n)^{1/2} (log_p n)^{-1/2}
    double log_g1 = std::numeric_limits<double>::quiet_NaN();  // NaN without sigma
    double g1 = std::numeric_limits<double>::quiet_NaN();
    double ell = std::numeric_limits<double>::quiet_NaN();     // log_3 n / Ie, NaN without Ie
};

// Throws Error(NTooSmall) when log_p n <= 1 (or n <= 3), Error(ConfigError)
// for p < 2 or gamma <= 0. sigma and ie are optional; they feed g1 and ell.
Scales compute_scales(std::int64_t n, int p, double gamma,
                      double sigma = std::numeric_limits<double>::quiet_NaN(),
                      double ie = std::numeric_limits<double>::quiet_NaN());

// Default half-width of the sampled window: ceil(6 (Gamma_n / sigma)^2).
Index default_window_radius(double Gamma_n, double sigma);

}  // namespace sinai
