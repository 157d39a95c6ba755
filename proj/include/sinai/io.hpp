#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "sinai/analysis.hpp"
#include "sinai/environment.hpp"
#include "sinai/valleys.hpp"
#include "sinai/walk.hpp"

namespace sinai::io {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchemaVersion = "1";

// {"kind": "two-point-symmetric", "a": ..} | {"kind": "uniform-symmetric", "lo": ..}
// | {"kind": "finite-support", "support": [[value, probability], ...]}
DistributionSpec parse_distribution(const Json& j);
Json to_json(const DistributionSpec& spec);

Json to_json(const HypothesisReport& report);

// {"lo", "hi", "alpha", "eta0", "sigma2", "seed"}; seed is the provenance string.
Json to_json(const Environment& env);
Environment parse_environment(const Json& j);

Json to_json(const BasicValley& v);
Json to_json(const GoodEnvReport& report);

// Collects every problem instead of stopping at the first; the config is only
// meaningful when `problems` stays empty.
ExperimentConfig parse_experiment_config(const Json& j, std::vector<std::string>& problems);
// Echo without the worker count, which never affects results.
Json to_json(const ExperimentConfig& config);
Json to_json(const ExperimentResult& result);
std::string records_csv(const ExperimentResult& result);

std::string profile_csv(const LocalTimeProfile& profile);
Json profile_sidecar(const LocalTimeProfile& profile, Seed seed);

Json read_json_file(const std::filesystem::path& path);
// Writes text exactly; throws Error(Io) on failure.
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string dump(const Json& j);

}  // namespace sinai::io
