#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "kirchlab/config.hpp"

using namespace kirchlab;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path work_dir() {
    auto d = fs::temp_directory_path() / "kirchlab_cli_test";
    fs::create_directories(d);
    return d;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(KIRCHLAB_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

} // namespace

TEST_CASE("config parsing applies defaults and collects all violations") {
    nlohmann::json j = {
        {"domain", {{"shape", "disk"}, {"radius", 1.0}, {"resolution", 256}}},
        {"params", {{"a", 0.25}, {"b", 0.25}, {"alpha", 1.0}, {"p", 2.0}}},
        {"output", "run"},
    };
    auto cfg = parse_config(j);
    CHECK(cfg.domain.shape == DomainShape::Disk);
    CHECK(cfg.tolerances.cg == 1e-10);
    CHECK(cfg.perturbation.kind == PerturbationSpec::Kind::None);

    j["params"]["p"] = 2.0;
    j["perturbation"] = {{"kind", "superlinear"}, {"lambda", 1.0}, {"q", 3.0}};
    j["domain"]["resolution"] = 8;
    try {
        parse_config(j);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("(H2) requires 1<q<p") != std::string::npos);
        CHECK(msg.find("resolution") != std::string::npos);
    }
}

TEST_CASE("sweep variable must name a config field; schedules are validated") {
    nlohmann::json j = {
        {"domain", {{"shape", "rectangle"}, {"resolution", 64}}},
        {"params", {{"a", 1.0}, {"b", 1.0}, {"alpha", 1.0}, {"p", 2.0}}},
        {"sweep", {{"variable", "bogus"}, {"values", {1.0, 2.0}}}},
    };
    CHECK_THROWS_WITH(parse_config(j),
                      Catch::Matchers::ContainsSubstring("does not name a config field"));

    j["sweep"] = {{"variable", "b"}, {"values", {1.0, 2.0}}};
    j["t_schedule"] = {0.0, 0.5, 1.0};
    CHECK_THROWS_WITH(parse_config(j), Catch::Matchers::ContainsSubstring("<= 0.1"));
}

TEST_CASE("branch subcommand emits the fixture roots and is byte-stable") {
    const auto dir = work_dir();
    const std::string fixture = std::string(KIRCHLAB_TEST_DATA) + "/branch_fixture.json";
    const auto out = (dir / "branch").string();

    REQUIRE(run_cli("branch --config " + fixture + " --out " + out) == 0);
    const std::string csv = slurp(out + ".csv");
    const std::string rep = slurp(out + ".report.json");

    CHECK(csv.find("0.07179676972449") != std::string::npos);
    CHECK(csv.find("13.9282032302755") != std::string::npos);
    CHECK(rep.find("\"config\"") != std::string::npos);  // provenance embedded

    // identical config, identical bytes
    REQUIRE(run_cli("branch --config " + fixture + " --out " + out) == 0);
    CHECK(slurp(out + ".csv") == csv);
    CHECK(slurp(out + ".report.json") == rep);
}

TEST_CASE("invalid config yields exit 2 and a machine-readable error report") {
    const auto dir = work_dir();
    const std::string fixture = std::string(KIRCHLAB_TEST_DATA) + "/invalid_h2.json";
    const auto out = (dir / "bad").string();
    CHECK(run_cli("branch --config " + fixture + " --out " + out) == 2);
    const std::string err = slurp(out + ".error.json");
    CHECK(err.find("(H2) requires 1<q<p") != std::string::npos);
}

TEST_CASE("oracle subcommand writes the radial profile") {
    const auto dir = work_dir();
    const std::string fixture = std::string(KIRCHLAB_TEST_DATA) + "/oracle_fixture.json";
    const auto out = (dir / "oracle").string();
    REQUIRE(run_cli("oracle --config " + fixture + " --out " + out) == 0);
    const std::string csv = slurp(out + ".csv");
    CHECK(csv.rfind("r,v", 0) == 0);
    const std::string rep = slurp(out + ".report.json");
    CHECK(rep.find("S_omega") != std::string::npos);
}

TEST_CASE("sweep output is thread-count independent; continuation completes") {
    const auto dir = work_dir();
    const std::string sweep = std::string(KIRCHLAB_TEST_DATA) + "/sweep_fixture.json";
    const auto out1 = (dir / "sweep_t1").string();
    const auto out2 = (dir / "sweep_t2").string();
    REQUIRE(run_cli("sweep --config " + sweep + " --threads 1 --out " + out1) == 0);
    REQUIRE(run_cli("sweep --config " + sweep + " --threads 2 --out " + out2) == 0);
    CHECK(slurp(out1 + ".csv") == slurp(out2 + ".csv"));

    const std::string cont = std::string(KIRCHLAB_TEST_DATA) + "/continuation_fixture.json";
    const auto outc = (dir / "cont").string();
    REQUIRE(run_cli("continuation --config " + cont + " --out " + outc) == 0);
    auto j = nlohmann::json::parse(slurp(outc + ".report.json"));
    CHECK(j["completed"].get<bool>());
    CHECK(j["path"].size() >= 11);
}

TEST_CASE("groundstate subcommand reports the constants") {
    const auto dir = work_dir();
    const std::string fixture = std::string(KIRCHLAB_TEST_DATA) + "/groundstate_fixture.json";
    const auto out = (dir / "gs").string();
    REQUIRE(run_cli("groundstate --config " + fixture + " --resolution 64 --out " + out) == 0);
    auto j = nlohmann::json::parse(slurp(out + ".report.json"));
    CHECK(j["groundstate"]["S_omega"].get<double>() > 0.0);
    CHECK(j["groundstate"]["residual_rel"].get<double>() <= 1e-8);
    CHECK(j["config"]["domain"]["resolution"].get<int>() == 64);  // override resolved
}
