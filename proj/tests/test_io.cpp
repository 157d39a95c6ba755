#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "fixtures.hpp"
#include "sinai/error.hpp"
#include "sinai/io.hpp"

using namespace sinai;
using io::Json;

namespace {

std::filesystem::path temp_path(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("sinai_test_io_" + name);
}

}  // namespace

TEST_CASE("distribution specs round-trip") {
    const DistributionSpec specs[] = {TwoPointSymmetric{0.3}, UniformSymmetric{0.15},
                                      FiniteSupport{{{0.25, 0.5}, {0.75, 0.5}}}};
    for (const auto& s : specs) {
        const Json j = io::to_json(s);
        CHECK(io::to_json(io::parse_distribution(j)) == j);
    }
    CHECK_THROWS_AS(io::parse_distribution(Json::parse(R"({"kind":"gaussian"})")), Error);
    CHECK_THROWS_AS(io::parse_distribution(Json::parse(R"({"kind":"two-point-symmetric"})")), Error);
}

TEST_CASE("environments round-trip bit for bit") {
    const auto env = sample_environment(UniformSymmetric{0.1}, -200, 300, 77);
    const auto text = io::dump(io::to_json(env));
    const auto back = io::parse_environment(Json::parse(text));
    CHECK(back.lo() == env.lo());
    CHECK(back.hi() == env.hi());
    for (Index k = env.lo(); k <= env.hi(); ++k) REQUIRE(back.alpha(k) == env.alpha(k));
    CHECK(back.eta0() == env.eta0());
    CHECK(back.sigma2() == env.sigma2());
    CHECK(back.provenance() == env.provenance());
    CHECK(io::dump(io::to_json(back)) == text);
}

TEST_CASE("malformed environments are rejected") {
    CHECK_THROWS_AS(io::parse_environment(Json::parse(R"({"lo":0,"alpha":[0.5]})")), Error);
    CHECK_THROWS_AS(io::parse_environment(Json::parse(R"({"lo":-1,"hi":5,"alpha":[0.5,0.5,0.5],"eta0":0.5,"sigma2":1})")),
                    Error);
    CHECK_THROWS_AS(io::parse_environment(Json::parse(R"({"lo":-1,"alpha":[0.5,1.5,0.5],"eta0":0.1,"sigma2":1})")),
                    Error);
}

TEST_CASE("experiment configs round-trip and report every problem") {
    ExperimentConfig c;
    c.kind = ExperimentKind::Radius;
    c.n_grid = {10000, 100000};
    c.theta.preset = "table";
    c.theta.table = {{10000, 4.0}, {100000, 9.5}};
    c.c1 = 2.5;
    c.seed = 18446744073709551615ull;
    c.distribution = UniformSymmetric{0.2};
    std::vector<std::string> problems;
    const Json j = io::to_json(c);
    const auto back = io::parse_experiment_config(j, problems);
    CHECK(problems.empty());
    CHECK(io::to_json(back) == j);
    CHECK(back.seed == c.seed);

    const auto bad = Json::parse(R"({"kind":"nope","p":"two","trials":0,"extra":true,"theta":{"preset":"wild"}})");
    problems.clear();
    io::parse_experiment_config(bad, problems);
    auto has = [&](const std::string& needle) {
        for (const auto& p : problems) {
            if (p.find(needle) != std::string::npos) return true;
        }
        return false;
    };
    CHECK(has("kind"));
    CHECK(has("'p'"));
    CHECK(has("trials"));
    CHECK(has("extra"));
    CHECK(has("theta"));
}

TEST_CASE("records CSV has a stable header") {
    ExperimentConfig c;
    c.kind = ExperimentKind::Radius;
    c.gamma = 1.0;
    c.trials = 4;
    c.bootstrap = 50;
    const auto res = run_experiment(c);
    const auto csv = io::records_csv(res);
    std::istringstream in(csv);
    std::string header;
    std::getline(in, header);
    CHECK(header == "n,trial,env_seed,status,Mn_prime,mn,Mn,Y_n,theta,success");
    int rows = 0;
    for (std::string line; std::getline(in, line);) ++rows;
    CHECK(rows == 4);
    const Json j = io::to_json(res);
    CHECK(j.at("version") == io::kSchemaVersion);
    CHECK(j.at("records").size() == 4);
    CHECK(j.contains("aggregates"));
    CHECK(j.contains("failures"));
}

TEST_CASE("profile CSV lists visited sites") {
    const auto p = LocalTimeProfile::from_entries({{-1, 2}, {0, 3}, {2, 1}});
    CHECK(io::profile_csv(p) == "site,count\n-1,2\n0,3\n2,1\n");
    const Json side = io::profile_sidecar(p, 99);
    CHECK(side.at("n") == 6);
    CHECK(side.at("seed") == "99");
}

TEST_CASE("file errors map to error codes") {
    try {
        io::read_json_file(temp_path("does_not_exist.json"));
        FAIL("expected Io");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Io);
    }
    const auto bad = temp_path("bad.json");
    {
        std::ofstream out(bad);
        out << "{not json";
    }
    try {
        io::read_json_file(bad);
        FAIL("expected MalformedSpec");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MalformedSpec);
    }
    std::filesystem::remove(bad);
    const auto good = temp_path("ok.txt");
    io::write_text_file(good, "abc\n");
    std::ifstream in(good);
    std::string s;
    std::getline(in, s);
    CHECK(s == "abc");
    std::filesystem::remove(good);
}
