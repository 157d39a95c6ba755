#include "sinai/io.hpp"

#include <charconv>
#include <cinttypes>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "sinai/error.hpp"

namespace sinai::io {

namespace {

[[noreturn]] void malformed(const std::string& what) { throw Error(ErrorCode::MalformedSpec, what); }

double number(const Json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_number()) {
        malformed(std::string("field '") + key + "' must be a number");
    }
    return j.at(key).get<double>();
}

std::string format_double(double v) {
    if (std::isnan(v)) return "";
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

Seed parse_seed(const Json& j) {
    if (j.is_number_unsigned()) return j.get<std::uint64_t>();
    if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return j.get<std::uint64_t>();
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        std::size_t used = 0;
        const unsigned long long v = std::stoull(s, &used, 10);
        if (used != s.size()) throw std::invalid_argument("trailing characters");
        return v;
    }
    throw std::invalid_argument("not a non-negative integer");
}

}  // namespace

DistributionSpec parse_distribution(const Json& j) {
    if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) {
        malformed("distribution needs a string field 'kind'");
    }
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "two-point-symmetric") return TwoPointSymmetric{number(j, "a")};
    if (kind == "uniform-symmetric") return UniformSymmetric{number(j, "lo")};
    if (kind == "finite-support") {
        if (!j.contains("support") || !j.at("support").is_array()) {
            malformed("finite-support needs an array 'support'");
        }
        FiniteSupport fs;
        for (const auto& atom : j.at("support")) {
            if (!atom.is_array() || atom.size() != 2 || !atom[0].is_number() || !atom[1].is_number()) {
                malformed("support atoms must be [value, probability] pairs");
            }
            fs.atoms.emplace_back(atom[0].get<double>(), atom[1].get<double>());
        }
        return fs;
    }
    malformed("unknown distribution kind '" + kind + "'");
}

Json to_json(const DistributionSpec& spec) {
    return std::visit(
        [](const auto& d) -> Json {
            using T = std::decay_t<decltype(d)>;
            Json j;
            if constexpr (std::is_same_v<T, TwoPointSymmetric>) {
                j["kind"] = "two-point-symmetric";
                j["a"] = d.a;
            } else if constexpr (std::is_same_v<T, UniformSymmetric>) {
                j["kind"] = "uniform-symmetric";
                j["lo"] = d.lo;
            } else {
                j["kind"] = "finite-support";
                Json support = Json::array();
                for (const auto& [v, w] : d.atoms) support.push_back({v, w});
                j["support"] = support;
            }
            return j;
        },
        spec);
}

Json to_json(const HypothesisReport& r) {
    Json j;
    j["eta0"] = r.eta0;
    j["sigma2"] = r.sigma2;
    j["Ie"] = r.ie;
    j["mean_eps"] = r.mean_eps;
    j["regular"] = r.regular;
    j["mean_zero"] = r.mean_zero;
    j["positive_variance"] = r.positive_variance;
    j["ok"] = r.ok;
    return j;
}

Json to_json(const Environment& env) {
    Json j;
    j["lo"] = env.lo();
    j["hi"] = env.hi();
    j["alpha"] = std::vector<double>(env.alphas().begin(), env.alphas().end());
    j["eta0"] = env.eta0();
    j["sigma2"] = env.sigma2();
    j["seed"] = env.provenance();
    return j;
}

Environment parse_environment(const Json& j) {
    if (!j.is_object()) malformed("environment must be a JSON object");
    if (!j.contains("lo") || !j.at("lo").is_number_integer()) malformed("field 'lo' must be an integer");
    if (!j.contains("alpha") || !j.at("alpha").is_array()) malformed("field 'alpha' must be an array");
    std::vector<double> alpha;
    for (const auto& a : j.at("alpha")) {
        if (!a.is_number()) malformed("alpha entries must be numbers");
        alpha.push_back(a.get<double>());
    }
    const auto lo = j.at("lo").get<Index>();
    if (j.contains("hi") && j.at("hi").is_number_integer() &&
        j.at("hi").get<Index>() != lo + static_cast<Index>(alpha.size()) - 1) {
        malformed("'hi' does not match the length of 'alpha'");
    }
    const std::string seed = j.contains("seed") && j.at("seed").is_string()
                                 ? j.at("seed").get<std::string>()
                                 : std::string("fixture");
    return Environment(lo, std::move(alpha), number(j, "eta0"), number(j, "sigma2"), seed);
}

Json to_json(const BasicValley& v) {
    Json j;
    j["Mn_prime"] = v.Mn_prime;
    j["mn"] = v.mn;
    j["Mn"] = v.Mn;
    j["Gamma_n"] = v.Gamma_n;
    j["depth_left"] = v.depth_left;
    j["depth_right"] = v.depth_right;
    j["refinements"] = v.refinement_count;
    return j;
}

Json to_json(const GoodEnvReport& r) {
    Json j;
    j["n"] = r.n;
    j["p"] = r.p;
    j["gamma"] = r.gamma;
    j["c1"] = r.c1;
    j["valley"] = r.valley ? to_json(*r.valley) : Json(nullptr);
    Json checks = Json::array();
    for (const auto& c : r.checks) {
        Json e;
        e["name"] = c.name;
        e["measured"] = c.measured;
        e["threshold"] = c.threshold;
        e["comparison"] = c.comparison == Comparison::AtLeast ? ">=" : "<=";
        e["evaluated"] = c.evaluated;
        e["passed"] = c.passed;
        checks.push_back(e);
    }
    j["checks"] = checks;
    j["good"] = r.good;
    return j;
}

ExperimentConfig parse_experiment_config(const Json& j, std::vector<std::string>& problems) {
    ExperimentConfig c;
    if (!j.is_object()) {
        problems.push_back("config must be a JSON object");
        return c;
    }
    static const std::set<std::string> known{"kind",   "n_grid",       "p",         "gamma",
                                             "rho",    "theta",        "trials",    "environments",
                                             "seed",   "cap",          "c1",        "distribution",
                                             "neighbors", "bootstrap", "workers"};
    for (const auto& [key, value] : j.items()) {
        if (!known.count(key)) problems.push_back("unknown field '" + key + "'");
    }
    auto integer = [&](const char* key, auto& target) {
        if (!j.contains(key)) return;
        if (!j.at(key).is_number_integer()) {
            problems.push_back(std::string("'") + key + "' must be an integer");
            return;
        }
        target = j.at(key).get<std::decay_t<decltype(target)>>();
    };
    auto real = [&](const char* key, double& target) {
        if (!j.contains(key)) return;
        if (!j.at(key).is_number()) {
            problems.push_back(std::string("'") + key + "' must be a number");
            return;
        }
        target = j.at(key).get<double>();
    };

    if (j.contains("kind")) {
        const auto k = j.at("kind").is_string() ? parse_experiment_kind(j.at("kind").get<std::string>())
                                                : std::nullopt;
        if (k) c.kind = *k;
        else problems.push_back("'kind' must be one of concentration, radius, lln, env-stats, favorites");
    }
    if (j.contains("n_grid")) {
        const Json& g = j.at("n_grid");
        if (!g.is_array()) {
            problems.push_back("'n_grid' must be an array of integers");
        } else {
            c.n_grid.clear();
            for (const auto& n : g) {
                if (n.is_number_integer()) c.n_grid.push_back(n.get<std::int64_t>());
                else problems.push_back("'n_grid' entries must be integers");
            }
        }
    }
    integer("p", c.p);
    real("gamma", c.gamma);
    real("rho", c.rho);
    integer("trials", c.trials);
    integer("environments", c.environments);
    integer("cap", c.cap);
    integer("bootstrap", c.bootstrap);
    integer("workers", c.workers);
    if (j.contains("seed")) {
        try {
            c.seed = parse_seed(j.at("seed"));
        } catch (const std::exception&) {
            problems.push_back("'seed' must be a non-negative integer");
        }
    }
    if (j.contains("c1") && !j.at("c1").is_null()) {
        if (j.at("c1").is_number()) c.c1 = j.at("c1").get<double>();
        else problems.push_back("'c1' must be a number or null");
    }
    if (j.contains("neighbors")) {
        if (j.at("neighbors").is_boolean()) c.neighbors = j.at("neighbors").get<bool>();
        else problems.push_back("'neighbors' must be a boolean");
    }
    if (j.contains("theta")) {
        const Json& t = j.at("theta");
        if (!t.is_object() || !t.contains("preset") || !t.at("preset").is_string()) {
            problems.push_back("'theta' must be an object with a string 'preset'");
        } else {
            c.theta.preset = t.at("preset").get<std::string>();
            if (t.contains("value")) {
                if (t.at("value").is_number()) c.theta.value = t.at("value").get<double>();
                else problems.push_back("'theta.value' must be a number");
            }
            if (t.contains("table")) {
                if (!t.at("table").is_object()) {
                    problems.push_back("'theta.table' must map n to theta");
                } else {
                    for (const auto& [n, v] : t.at("table").items()) {
                        try {
                            if (!v.is_number()) throw std::invalid_argument("value");
                            c.theta.table[std::stoll(n)] = v.get<double>();
                        } catch (const std::exception&) {
                            problems.push_back("'theta.table' entry '" + n + "' is malformed");
                        }
                    }
                }
            }
        }
    }
    if (j.contains("distribution")) {
        try {
            c.distribution = parse_distribution(j.at("distribution"));
        } catch (const Error& e) {
            problems.push_back(std::string("distribution: ") + e.what());
        }
    }
    for (auto& p : validate(c)) problems.push_back(std::move(p));
    return c;
}

Json to_json(const ExperimentConfig& c) {
    Json j;
    j["kind"] = to_string(c.kind);
    j["n_grid"] = c.n_grid;
    j["p"] = c.p;
    j["gamma"] = c.gamma;
    j["rho"] = c.rho;
    Json theta;
    theta["preset"] = c.theta.preset;
    if (c.theta.preset == "constant") theta["value"] = c.theta.value;
    if (c.theta.preset == "table") {
        Json table = Json::object();
        for (const auto& [n, v] : c.theta.table) table[std::to_string(n)] = v;
        theta["table"] = table;
    }
    j["theta"] = theta;
    j["trials"] = c.trials;
    j["environments"] = c.environments;
    j["seed"] = c.seed;
    j["cap"] = c.cap;
    j["c1"] = c.c1 ? Json(*c.c1) : Json(nullptr);
    j["distribution"] = to_json(c.distribution);
    j["neighbors"] = c.neighbors;
    j["bootstrap"] = c.bootstrap;
    return j;
}

Json to_json(const ExperimentResult& r) {
    Json j;
    j["config"] = to_json(r.config);
    Json records = Json::array();
    for (const auto& rec : r.records) {
        Json e;
        e["n"] = rec.n;
        e["trial"] = rec.trial;
        e["env_seed"] = std::to_string(rec.env_seed);
        e["status"] = to_string(rec.status);
        e["valley"] = rec.valley ? to_json(*rec.valley) : Json(nullptr);
        Json values = Json::object();
        for (const auto& [k, v] : rec.values) values[k] = v;
        e["values"] = values;
        if (r.config.kind == ExperimentKind::Favorites) e["favorites"] = rec.favorites;
        records.push_back(e);
    }
    j["records"] = records;
    Json aggregates = Json::array();
    for (const auto& a : r.aggregates) {
        Json e;
        e["n"] = a.n;
        e["requested"] = a.requested;
        e["ok"] = a.ok;
        for (const auto& [k, v] : a.values) e[k] = v;
        aggregates.push_back(e);
    }
    j["aggregates"] = aggregates;
    Json failures = Json::object();
    for (const auto& [k, v] : r.failures) failures[k] = v;
    j["failures"] = failures;
    j["version"] = kSchemaVersion;
    return j;
}

std::string records_csv(const ExperimentResult& r) {
    std::vector<std::string> keys;
    std::set<std::string> seen;
    for (const auto& rec : r.records) {
        for (const auto& [k, v] : rec.values) {
            if (seen.insert(k).second) keys.push_back(k);
        }
    }
    std::ostringstream out;
    out << "n,trial,env_seed,status,Mn_prime,mn,Mn";
    for (const auto& k : keys) out << ',' << k;
    const bool favorites = r.config.kind == ExperimentKind::Favorites;
    if (favorites) out << ",favorites";
    out << '\n';
    for (const auto& rec : r.records) {
        out << rec.n << ',' << rec.trial << ',' << rec.env_seed << ',' << to_string(rec.status);
        if (rec.valley) out << ',' << rec.valley->Mn_prime << ',' << rec.valley->mn << ',' << rec.valley->Mn;
        else out << ",,,";
        for (const auto& k : keys) {
            const auto v = rec.value(k);
            out << ',' << (v ? format_double(*v) : std::string());
        }
        if (favorites) {
            out << ',';
            for (std::size_t i = 0; i < rec.favorites.size(); ++i) {
                out << (i ? ";" : "") << rec.favorites[i];
            }
        }
        out << '\n';
    }
    return out.str();
}

std::string profile_csv(const LocalTimeProfile& profile) {
    std::ostringstream out;
    out << "site,count\n";
    for (const auto& [site, count] : profile.entries()) out << site << ',' << count << '\n';
    return out.str();
}

Json profile_sidecar(const LocalTimeProfile& profile, Seed seed) {
    Json j;
    j["n"] = profile.steps();
    j["start"] = profile.start();
    j["final"] = profile.final_position();
    j["seed"] = std::to_string(seed);
    return j;
}

Json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw Error(ErrorCode::MalformedSpec, path.string() + ": " + e.what());
    }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    out << text;
    out.flush();
    if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace sinai::io
