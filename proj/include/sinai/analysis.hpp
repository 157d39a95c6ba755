#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sinai/environment.hpp"
#include "sinai/rng.hpp"
#include "sinai/valleys.hpp"

namespace sinai {

// ---------------------------------------------------------------------------
// Good environments
// ---------------------------------------------------------------------------

enum class Comparison { AtLeast, AtMost };

struct PropertyCheck {
    std::string name;
    double measured = 0.0;
    double threshold = 0.0;
    Comparison comparison = Comparison::AtLeast;
    bool evaluated = true;  // false when the valley is missing
    bool passed = false;
};

// Verdict of one check from its measured value and threshold alone.
bool evaluate(const PropertyCheck& check);

struct GoodEnvReport {
    std::int64_t n = 0;
    int p = 2;
    double gamma = 0.0;
    double c1 = 0.0;
    std::optional<BasicValley> valley;
    std::vector<PropertyCheck> checks;
    bool good = false;

    const PropertyCheck* find(const std::string& name) const;
    // Re-derives every verdict and the conjunction from the stored values.
    void recompute();
};

// Boolean properties are stored as 1/0 against threshold 1. The g1 minima
// are compared in log form: log(min) >= -log g1(n).
GoodEnvReport check_good_environment(const Environment& env, const Potential& pot, std::int64_t n,
                                     int p, double gamma, double c1);

// Default c1 from a 10^4-environment pilot (configs/pilot/c1.json): the 99th
// percentile 18.56 of E[xi(F_p(n), T_mn)] / log_{p+1} n at n = 10^6,
// gamma = 11, rounded up.
inline constexpr double kDefaultC1 = 18.6;

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

enum class ExperimentKind { Concentration, Radius, Lln, EnvStats, Favorites };

std::string to_string(ExperimentKind kind);
std::optional<ExperimentKind> parse_experiment_kind(const std::string& name);

// theta(n): a named preset or an explicit per-n table.
struct ThetaSpec {
    std::string preset = "log2-squared";  // "log2-squared", "log2", "constant", "table"
    double value = 0.0;                   // for "constant"
    std::map<std::int64_t, double> table;

    double operator()(std::int64_t n) const;
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::Concentration;
    std::vector<std::int64_t> n_grid{10000};
    int p = 2;
    double gamma = 11.0;
    double rho = 1.0;
    ThetaSpec theta;
    std::int64_t trials = 1;        // walks per n
    std::int64_t environments = 1;  // environments per n for env-stats
    Seed seed = 1;
    std::int64_t cap = 1 << 20;     // largest sampled window half-width
    std::optional<double> c1;
    DistributionSpec distribution = TwoPointSymmetric{0.25};
    bool neighbors = false;         // LLN over the ell(n)-window as well as m_n
    int bootstrap = 2000;
    int workers = 1;                // never echoed; results do not depend on it
};

// Every problem with the config; empty when valid.
std::vector<std::string> validate(const ExperimentConfig& config);

enum class TrialStatus { Ok, NoValley, WindowExit, Capped };

std::string to_string(TrialStatus status);

struct TrialRecord {
    std::int64_t n = 0;
    std::int64_t trial = 0;
    Seed env_seed = 0;
    TrialStatus status = TrialStatus::Ok;
    std::optional<BasicValley> valley;
    std::vector<std::pair<std::string, double>> values;  // in output order
    std::vector<Index> favorites;

    std::optional<double> value(const std::string& key) const;
};

struct NAggregate {
    std::int64_t n = 0;
    std::int64_t requested = 0;
    std::int64_t ok = 0;
    std::vector<std::pair<std::string, double>> values;  // NaN when undefined

    double value(const std::string& key) const;
};

struct ExperimentResult {
    ExperimentConfig config;
    std::vector<TrialRecord> records;
    std::vector<NAggregate> aggregates;
    std::map<std::string, std::int64_t> failures;
};

// Seeds: environment of trial t is derive(seed, env, t) for every n, so one
// environment is followed along the n-grid; the walk stream is derive(seed,
// walk, t, n).
Seed environment_seed(Seed master, std::int64_t trial);
Stream walk_stream(Seed master, std::int64_t trial, std::int64_t n);

ExperimentResult run_experiment(const ExperimentConfig& config);
ExperimentResult run_concentration(const ExperimentConfig& config);
ExperimentResult run_concentration_radius(const ExperimentConfig& config);
ExperimentResult run_local_time_lln(const ExperimentConfig& config);
ExperimentResult run_env_statistics(const ExperimentConfig& config);
ExperimentResult run_favorites(const ExperimentConfig& config);

// Aggregates and failure counts as a pure function of the records.
std::vector<NAggregate> compute_aggregates(const ExperimentConfig& config,
                                           const std::vector<TrialRecord>& records);
std::map<std::string, std::int64_t> count_failures(const std::vector<TrialRecord>& records);

// Valley located on an environment sampled around 0, widened by doubling up to
// `cap`. Status is Ok, NoValley or Capped.
struct SampledValley {
    TrialStatus status = TrialStatus::Ok;
    std::optional<Environment> env;
    std::optional<Potential> potential;
    std::optional<BasicValley> valley;
};

SampledValley sample_valley(const DistributionSpec& spec, Seed seed, const Scales& scales,
                            std::int64_t cap);

}  // namespace sinai
