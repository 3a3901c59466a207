#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nlslab/asymptotics.hpp"
#include "nlslab/modulation.hpp"

namespace nlslab {

inline constexpr const char* kCodeVersion = "nlslab 0.1.0";

extern const std::vector<std::string> kExperimentNames;

struct PotentialConfig {
    std::string preset = "gaussian_well";
    double amplitude = 1.0;
    double width = 1.0;
};

// Flat run description. Fields not used by a given experiment keep their
// defaults and are still round-tripped through the config file.
struct ExperimentConfig {
    std::string experiment;
    PotentialConfig potential;

    double half_width = 100.0;
    int n_points = 2048;
    double band_limit = 8.0;
    int m_points = 512;

    double epsilon = 0.05;
    double dt = 0.0625;
    double t_end = 200.0;
    int snapshot_stride = 20;

    std::string recipe = "packet"; // packet | freq_packet | soliton_plus_packet
    double z0 = 0.08;
    double center = 0.0;
    double velocity = 0.0;
    double width = 9.0;
    double freq_center = 0.3;
    double freq_sigma = 0.4;

    double alpha = kProfileAlpha;
    double fit_t_min = 10.0;
    double fit_t_max = 200.0;
    double probe_k = 0.0; // 0 -> pick the node where |W| peaks
    // top of the fixed band used for dyadic profile gaps; above ~3x the data's
    // spectral peak the content is generated during the run and settles later
    double gap_k_max = 0.6;

    std::uint64_t seed = 1;
    std::string out_dir = "out";
};

// Experiment-specific defaults; throws on an unknown experiment name.
ExperimentConfig default_config(const std::string& experiment);

// JSON text <-> config. Unknown keys are rejected with their path;
// serialize(parse(text)) reparses to an equal config.
ExperimentConfig parse_config(const std::string& text);
std::string serialize_config(const ExperimentConfig& cfg);
bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);

Potential make_potential(const PotentialConfig& pc);

struct CriterionResult {
    std::string name;
    double value = 0.0;
    std::string requirement;
    bool pass = false;
};

struct RunManifest {
    std::string experiment;
    std::string config_echo;
    std::string code_version = kCodeVersion;
    double wall_clock_s = 0.0;
    std::vector<CriterionResult> criteria;
    std::string failure; // nonempty if the run aborted partway

    bool all_pass() const;
    std::string to_json() const;
    const CriterionResult& at(const std::string& name) const;
};

// Runs the named pipeline, writes artifacts + manifest.json under
// cfg.out_dir, and returns the manifest. Module errors are captured in
// manifest.failure after flushing whatever artifacts exist.
RunManifest run_experiment(const ExperimentConfig& cfg);

} // namespace nlslab
