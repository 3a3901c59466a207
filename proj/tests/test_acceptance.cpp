// End-to-end acceptance gate: every release criterion is exercised through
// the experiment pipelines and reported as a single pass/fail line.
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "nlslab/experiments.hpp"

using namespace nlslab;
namespace fs = std::filesystem;

namespace {

fs::path accept_dir(const std::string& leaf) {
    fs::path p = fs::temp_directory_path() / "nlslab_acceptance" / leaf;
    fs::create_directories(p);
    return p;
}

// each experiment runs once; criteria pull from the cached manifest
const RunManifest& manifest_for(const std::string& name) {
    static std::map<std::string, RunManifest> cache;
    auto it = cache.find(name);
    if (it == cache.end()) {
        ExperimentConfig cfg = default_config(name);
        cfg.out_dir = accept_dir(name).string();
        it = cache.emplace(name, run_experiment(cfg)).first;
        REQUIRE_MESSAGE(it->second.failure.empty(), name, " failed: ", it->second.failure);
    }
    return it->second;
}

bool gates(const std::string& experiment, const std::vector<std::string>& names) {
    const RunManifest& man = manifest_for(experiment);
    bool ok = true;
    for (const auto& n : names) {
        const CriterionResult& c = man.at(n);
        CAPTURE(n);
        CAPTURE(c.value);
        CHECK_MESSAGE(c.pass, experiment, "/", n, " = ", c.value, " (", c.requirement, ")");
        ok = ok && c.pass;
    }
    return ok;
}

void report(int number, const std::string& title, bool pass) {
    std::printf("ACCEPTANCE %2d %-24s %s\n", number, title.c_str(), pass ? "PASS" : "FAIL");
    std::fflush(stdout);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE_MESSAGE(in.good(), "missing artifact ", p.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("criterion 1: scattering identities") {
    report(1, "scattering-identities",
           gates("scattering-audit",
                 {"unitarity_defect", "cross_identity_defect", "runtime_s"}));
}

TEST_CASE("criterion 2: reflectionless Jost oracle") {
    report(2, "jost-oracle",
           gates("scattering-audit", {"sech2_jost_sup_error", "sech2_reflectivity"}));
}

TEST_CASE("criterion 3: genericity classification") {
    report(3, "genericity",
           gates("scattering-audit",
                 {"gaussian_generic", "sech2_nongeneric", "smallk_law_spread"}));
}

TEST_CASE("criterion 4: distorted transform") {
    report(4, "distorted-transform",
           gates("scattering-audit", {"plancherel_defect", "diagonalization_defect",
                                      "roundtrip_defect", "free_transform_flat"}));
}

TEST_CASE("criterion 5: spectral pair") {
    report(5, "spectral-pair",
           gates("scattering-audit",
                 {"negative_eigenvalues", "shooting_rho2_diff", "eigenpair_residual"}));
}

TEST_CASE("criterion 6: nonlinear bound state") {
    report(6, "bound-state",
           gates("boundstate-branch", {"elliptic_residual_max", "gauge_covariance",
                                       "E_defect_order", "soliton_propagation_error"}));
}

TEST_CASE("criterion 7: conservation laws") {
    bool ok = gates("boundstate-branch", {"mass_drift", "quartic_selection"});
    ok = gates("soliton-stability", {"mass_drift"}) && ok;
    report(7, "conservation", ok);
}

TEST_CASE("criterion 8: linear decay suite") {
    report(8, "linear-decay",
           gates("linear-decay", {"sup_exponent", "weighted_sup_exponent",
                                  "weighted_deriv_exponent", "smoothing_saturation"}));
}

TEST_CASE("criterion 9: soliton stability") {
    report(9, "soliton-stability",
           gates("soliton-stability",
                 {"eta_sup_exponent", "ortho_residual_max", "modulation_defect_exponent",
                  "z_dyadic_decreasing"}));
}

TEST_CASE("criterion 10: modified scattering") {
    report(10, "modified-scattering",
           gates("modified-scattering",
                 {"cauchy_gaps_decreasing", "phase_drift_rel", "profile_constancy"}));
}

TEST_CASE("criterion 11: cubic resonance dominance") {
    report(11, "cubic-resonance",
           gates("modified-scattering", {"resonance_exponent", "resonance_r2"}));
}

TEST_CASE("criterion 12: refined profile expansion") {
    report(12, "refined-profiles",
           gates("boundstate-branch", {"refined_residual_max", "refined_contraction",
                                       "refined_quadratic_scaling"}));
}

TEST_CASE("criterion 13: model problem") {
    report(13, "model-problem",
           gates("model-problem", {"no_bound_state", "sup_exponent", "cauchy_gaps_decreasing",
                                   "phase_drift_rel", "profile_constancy"}));
}

TEST_CASE("criterion 14: determinism") {
    ExperimentConfig cfg = default_config("boundstate-branch");
    cfg.out_dir = accept_dir("determinism-a").string();
    RunManifest m1 = run_experiment(cfg);
    REQUIRE(m1.failure.empty());
    ExperimentConfig cfg2 = cfg;
    cfg2.out_dir = accept_dir("determinism-b").string();
    RunManifest m2 = run_experiment(cfg2);
    REQUIRE(m2.failure.empty());

    bool ok = true;
    for (const char* name :
         {"branch.csv", "refined.csv", "conservation_selection.csv"}) {
        CAPTURE(name);
        bool same = slurp(fs::path(cfg.out_dir) / name) == slurp(fs::path(cfg2.out_dir) / name);
        CHECK_MESSAGE(same, name, " differs between identical runs");
        ok = ok && same;
    }
    report(14, "determinism", ok);
}
