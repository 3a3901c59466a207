#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "nlslab/experiments.hpp"

using namespace nlslab;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("minimal document inherits the experiment defaults") {
    ExperimentConfig c = parse_config(R"({"experiment": "linear-decay"})");
    CHECK(c == default_config("linear-decay"));
    CHECK(c.recipe == "freq_packet");
    CHECK(c.half_width == 200.0);
}

TEST_CASE("serialize / parse round-trips every field") {
    for (const auto& name : kExperimentNames) {
        ExperimentConfig c = default_config(name);
        c.epsilon = 0.11;
        c.seed = 42;
        c.probe_k = 0.37;
        c.out_dir = "elsewhere";
        ExperimentConfig back = parse_config(serialize_config(c));
        CHECK(back == c);
    }
}

TEST_CASE("unknown keys are rejected with their path") {
    auto expect_path = [](const std::string& doc, const std::string& path) {
        try {
            parse_config(doc);
            FAIL("expected rejection of ", doc);
        } catch (const std::invalid_argument& e) {
            CHECK(std::string(e.what()).find(path) != std::string::npos);
        }
    };
    expect_path(R"({"experiment": "linear-decay", "grdi": {}})", "/grdi");
    expect_path(R"({"experiment": "linear-decay", "grid": {"half_width": 100, "np": 4}})",
                "/grid/np");
    expect_path(R"({"experiment": "linear-decay", "evolution": {"foo": 1}})", "/evolution/foo");
}

TEST_CASE("constraint violations are rejected") {
    CHECK_THROWS_AS(parse_config(R"({"experiment": "nope"})"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config(R"({"experiment": "linear-decay",
                                     "evolution": {"epsilon": 0.5}})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(parse_config(R"({"experiment": "linear-decay",
                                     "grid": {"n_points": 127}})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(parse_config(R"({"experiment": "linear-decay",
                                     "potential": {"preset": "coulomb"}})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(parse_config(R"({"experiment"})"), std::invalid_argument);
    CHECK_THROWS_AS(default_config("nope"), std::invalid_argument);
}

TEST_CASE("boundstate-branch runs end to end with deterministic artifacts") {
    ExperimentConfig c = default_config("boundstate-branch");
    // small fixture keeps the smoke test quick
    c.half_width = 40.0;
    c.n_points = 512;
    c.t_end = 4.0;
    c.dt = 0.01;
    c.out_dir = (fs::temp_directory_path() / "nlslab_branch_a").string();
    RunManifest m1 = run_experiment(c);
    CHECK(m1.failure.empty());
    CHECK(m1.at("elliptic_residual_max").pass);
    CHECK(m1.at("gauge_covariance").pass);
    CHECK(m1.at("soliton_propagation_error").pass);

    ExperimentConfig c2 = c;
    c2.out_dir = (fs::temp_directory_path() / "nlslab_branch_b").string();
    RunManifest m2 = run_experiment(c2);

    for (const char* name : {"branch.csv", "refined.csv", "conservation_selection.csv"}) {
        CAPTURE(name);
        CHECK(slurp(fs::path(c.out_dir) / name) == slurp(fs::path(c2.out_dir) / name));
    }

    // manifest carries the config echo and per-criterion records
    std::string man = slurp(fs::path(c.out_dir) / "manifest.json");
    CHECK(man.find("\"experiment\": \"boundstate-branch\"") != std::string::npos);
    CHECK(man.find("elliptic_residual_max") != std::string::npos);
}

TEST_CASE("a failing run still writes a manifest with a failure marker") {
    ExperimentConfig c = default_config("boundstate-branch");
    c.half_width = 40.0;
    c.n_points = 512;
    c.dt = 10.0; // violates the step-size guard inside evolve
    c.out_dir = (fs::temp_directory_path() / "nlslab_branch_fail").string();
    RunManifest m = run_experiment(c);
    CHECK(!m.failure.empty());
    CHECK(!m.all_pass());
    std::string man = slurp(fs::path(c.out_dir) / "manifest.json");
    CHECK(man.find("\"status\": \"failed\"") != std::string::npos);
}
