#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "sinai/analysis.hpp"
#include "sinai/environment.hpp"
#include "sinai/error.hpp"
#include "sinai/exact.hpp"
#include "sinai/io.hpp"
#include "sinai/valleys.hpp"
#include "sinai/walk.hpp"

namespace fs = std::filesystem;
using namespace sinai;
using io::Json;

namespace {

enum Exit { kOk = 0, kIo = 1, kValidation = 2, kDomain = 3 };

int exit_code(ErrorCode code) {
    switch (code) {
        case ErrorCode::Io: return kIo;
        case ErrorCode::MalformedSpec:
        case ErrorCode::InvalidWindow:
        case ErrorCode::NTooSmall:
        case ErrorCode::ConfigError:
        case ErrorCode::DegenerateInterval: return kValidation;
        default: return kDomain;
    }
}

struct Globals {
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    std::string out;
    std::string config;
};

// Flag, then environment variable, then the fallback.
template <class T>
std::optional<T> from_env(const char* name) {
    const char* v = std::getenv(name);
    if (!v || !*v) return std::nullopt;
    try {
        if constexpr (std::is_same_v<T, int>) return std::stoi(v);
        else return static_cast<T>(std::stoull(v));
    } catch (const std::exception&) {
        throw Error(ErrorCode::ConfigError, std::string(name) + " is not a valid integer: " + v);
    }
}

Seed resolve_seed(const Globals& g, Seed fallback) {
    if (g.seed) return *g.seed;
    if (auto e = from_env<std::uint64_t>("SINAI_SEED")) return *e;
    return fallback;
}

int resolve_workers(const Globals& g, int fallback) {
    if (g.workers) return *g.workers;
    if (auto e = from_env<int>("SINAI_WORKERS")) return *e;
    return fallback;
}

void emit(const Globals& g, const std::string& text) {
    if (g.out.empty()) std::cout << text;
    else io::write_text_file(g.out, text);
}

int cmd_env(const Globals& g, const std::string& spec_path, Index lo, Index hi) {
    const DistributionSpec spec = io::parse_distribution(io::read_json_file(spec_path));
    const HypothesisReport h = validate_distribution(spec);
    if (!h.ok) {
        std::cerr << io::dump(io::to_json(h));
        return kValidation;
    }
    const Seed seed = resolve_seed(g, 1);
    Json j = io::to_json(sample_environment(spec, lo, hi, seed));
    j["distribution"] = io::to_json(spec);
    j["version"] = io::kSchemaVersion;
    emit(g, io::dump(j));
    return kOk;
}

int cmd_valley(const Globals& g, const std::string& env_path, std::int64_t n, int p, double gamma) {
    const Environment env = io::parse_environment(io::read_json_file(env_path));
    const Scales sc = compute_scales(n, p, gamma, env.sigma(), env.ie());
    const BasicValley v = find_basic_valley(build_potential(env), sc);
    emit(g, io::dump(io::to_json(v)));
    return kOk;
}

int cmd_walk(const Globals& g, const std::string& env_path, std::int64_t steps, Index start) {
    const Environment env = io::parse_environment(io::read_json_file(env_path));
    const Seed seed = resolve_seed(g, 1);
    Stream stream(seed);
    const WalkResult r = run_walk(env, start, steps, stream);
    if (g.out.empty()) {
        std::cout << io::profile_csv(r.profile);
    } else {
        io::write_text_file(g.out, io::profile_csv(r.profile));
        io::write_text_file(g.out + ".json", io::dump(io::profile_sidecar(r.profile, seed)));
    }
    return kOk;
}

struct ExactArgs {
    std::string quantity;
    Index a = 0, x = 0, b = 0, i = 0, m = 0, lo = 0, hi = 0;
};

int cmd_exact(const Globals& g, const std::string& env_path, const ExactArgs& q) {
    const Environment env = io::parse_environment(io::read_json_file(env_path));
    const Potential pot = build_potential(env);
    Json j;
    j["quantity"] = q.quantity;
    if (q.quantity == "ruin") {
        const auto r = exact::ruin_probabilities(pot, {q.a, q.x, q.b});
        j["a"] = q.a, j["x"] = q.x, j["b"] = q.b;
        j["p_a_before_b"] = r.p_a_before_b;
        j["p_b_before_a"] = r.p_b_before_a;
    } else if (q.quantity == "exit-time") {
        j["a"] = q.a, j["x"] = q.x, j["b"] = q.b;
        j["value"] = exact::expected_exit_time(pot, env, {q.a, q.x, q.b});
    } else if (q.quantity == "geometric") {
        j["a"] = q.a, j["x"] = q.x, j["b"] = q.b;
        j["p"] = exact::geometric_parameter(pot, env, {q.a, q.x, q.b});
    } else if (q.quantity == "local-time") {
        j["i"] = q.i, j["x"] = q.x;
        j["value"] = exact::expected_local_time(pot, env, q.i, q.x);
    } else if (q.quantity == "occupation") {
        j["lo"] = q.lo, j["hi"] = q.hi, j["m"] = q.m;
        j["value"] = exact::expected_occupation(pot, env, {q.lo, q.hi}, q.m);
        j["potential_sum"] = exact::potential_sum(pot, {q.lo, q.hi}, q.m);
    } else {
        throw Error(ErrorCode::ConfigError, "unknown quantity '" + q.quantity + "'");
    }
    emit(g, io::dump(j));
    return kOk;
}

int cmd_good_env(const Globals& g, const std::string& env_path, std::int64_t n, int p, double gamma,
                 double c1) {
    const Environment env = io::parse_environment(io::read_json_file(env_path));
    const GoodEnvReport r = check_good_environment(env, build_potential(env), n, p, gamma, c1);
    emit(g, io::dump(io::to_json(r)));
    return kOk;
}

int cmd_experiment(const Globals& g, const std::string& kind_name) {
    Json cfg_json = Json::object();
    if (!g.config.empty()) cfg_json = io::read_json_file(g.config);
    std::vector<std::string> problems;
    ExperimentConfig c = io::parse_experiment_config(cfg_json, problems);
    // Keep the parse errors; validation is redone after the overrides.
    const auto stale = validate(c);
    std::erase_if(problems, [&](const std::string& p) {
        return std::find(stale.begin(), stale.end(), p) != stale.end();
    });
    if (!kind_name.empty()) {
        if (auto k = parse_experiment_kind(kind_name)) c.kind = *k;
        else problems.push_back("unknown experiment kind '" + kind_name + "'");
    }
    c.seed = resolve_seed(g, c.seed);
    c.workers = resolve_workers(g, c.workers);
    for (auto& p : validate(c)) problems.push_back(std::move(p));
    if (!problems.empty()) {
        std::cerr << "invalid experiment config:\n";
        for (const auto& p : problems) std::cerr << "  " << p << "\n";
        return kValidation;
    }
    const ExperimentResult res = run_experiment(c);
    const std::string json = io::dump(io::to_json(res));
    const std::string csv = io::records_csv(res);
    if (g.out.empty()) {
        std::cout << json;
    } else {
        std::error_code ec;
        fs::create_directories(g.out, ec);
        if (ec) throw Error(ErrorCode::Io, "cannot create " + g.out + ": " + ec.message());
        io::write_text_file(fs::path(g.out) / "result.json", json);
        io::write_text_file(fs::path(g.out) / "records.csv", csv);
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Random walk in random environment: environments, valleys, walks, exact formulas and experiments"};
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    std::uint64_t seed_flag = 0;
    int workers_flag = 0;
    auto* seed_opt = app.add_option("--seed", seed_flag, "Master seed (overrides SINAI_SEED)");
    auto* workers_opt = app.add_option("--workers", workers_flag, "Worker threads (overrides SINAI_WORKERS)")
                            ->check(CLI::PositiveNumber);
    app.add_option("--out", g.out, "Output file (directory for experiment)");
    app.add_option("--config", g.config, "Experiment config JSON");

    std::string spec_path, env_path, kind_name;
    Index lo = -1000, hi = 1000, start = 0;
    std::int64_t n = 0, steps = 0;
    int p = 2;
    double gamma = 1.0;
    double c1 = kDefaultC1;
    ExactArgs ex;

    auto* env_cmd = app.add_subcommand("env", "Sample an environment on [lo, hi]");
    env_cmd->add_option("--spec", spec_path, "Distribution JSON")->required();
    env_cmd->add_option("--lo", lo, "Left end of the window");
    env_cmd->add_option("--hi", hi, "Right end of the window");

    auto* valley_cmd = app.add_subcommand("valley", "Basic valley of an environment");
    valley_cmd->add_option("--env", env_path, "Environment JSON")->required();
    valley_cmd->add_option("--n", n, "Time horizon")->required();
    valley_cmd->add_option("--p", p, "Iterated-log order");
    valley_cmd->add_option("--gamma", gamma, "Valley depth parameter");

    auto* walk_cmd = app.add_subcommand("walk", "Run one walk and print its local-time profile");
    walk_cmd->add_option("--env", env_path, "Environment JSON")->required();
    walk_cmd->add_option("--steps", steps, "Number of steps")->required();
    walk_cmd->add_option("--start", start, "Start site");

    auto* exact_cmd = app.add_subcommand("exact", "Evaluate an exact formula");
    exact_cmd->add_option("--env", env_path, "Environment JSON")->required();
    exact_cmd->add_option("--quantity", ex.quantity, "ruin, exit-time, geometric, local-time or occupation")
        ->required()
        ->check(CLI::IsMember({"ruin", "exit-time", "geometric", "local-time", "occupation"}));
    exact_cmd->add_option("--a", ex.a);
    exact_cmd->add_option("--x", ex.x);
    exact_cmd->add_option("--b", ex.b);
    exact_cmd->add_option("--i", ex.i);
    exact_cmd->add_option("--m", ex.m);
    exact_cmd->add_option("--lo", ex.lo);
    exact_cmd->add_option("--hi", ex.hi);

    auto* good_cmd = app.add_subcommand("good-env", "Check the good-environment properties");
    good_cmd->add_option("--env", env_path, "Environment JSON")->required();
    good_cmd->add_option("--n", n, "Time horizon")->required();
    good_cmd->add_option("--p", p, "Iterated-log order");
    good_cmd->add_option("--gamma", gamma, "Valley depth parameter");
    good_cmd->add_option("--c1", c1, "Occupation constant");

    auto* exp_cmd = app.add_subcommand("experiment", "Run an experiment from a config file");
    exp_cmd->add_option("--kind", kind_name, "concentration, radius, lln, env-stats or favorites");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kValidation;
    }
    if (*seed_opt) g.seed = seed_flag;
    if (*workers_opt) g.workers = workers_flag;

    try {
        if (*env_cmd) return cmd_env(g, spec_path, lo, hi);
        if (*valley_cmd) return cmd_valley(g, env_path, n, p, gamma);
        if (*walk_cmd) return cmd_walk(g, env_path, steps, start);
        if (*exact_cmd) return cmd_exact(g, env_path, ex);
        if (*good_cmd) return cmd_good_env(g, env_path, n, p, gamma, c1);
        if (*exp_cmd) return cmd_experiment(g, kind_name);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIo;
    }
    return kOk;
}
