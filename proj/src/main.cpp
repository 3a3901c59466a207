#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <omp.h>

#include "CLI11.hpp"

#include "nlslab/experiments.hpp"

int main(int argc, char** argv) {
    CLI::App app{"nlslab: numerical experiments for 1d cubic NLS with a potential"};

    std::string config_path;
    std::string out_dir;
    int threads = 0;
    bool validate_only = false;
    bool list_experiments = false;

    app.add_option("--config", config_path, "path to a JSON experiment configuration");
    app.add_option("--out-dir", out_dir, "override the configured output directory");
    app.add_option("--threads", threads, "OpenMP thread count (default: NLSLAB_THREADS or all)");
    app.add_flag("--validate-only", validate_only, "parse and validate the config, then exit");
    app.add_flag("--list-experiments", list_experiments, "list experiment names and exit");

    CLI11_PARSE(app, argc, argv);

    if (list_experiments) {
        for (const auto& name : nlslab::kExperimentNames) std::cout << name << "\n";
        return 0;
    }
    if (config_path.empty()) {
        std::cerr << "error: --config is required (or use --list-experiments)\n";
        return 2;
    }

    if (threads <= 0) {
        if (const char* env = std::getenv("NLSLAB_THREADS")) threads = std::atoi(env);
    }
    if (threads > 0) omp_set_num_threads(threads);

    std::ifstream in(config_path);
    if (!in) {
        std::cerr << "error: cannot read " << config_path << "\n";
        return 2;
    }
    std::stringstream buf;
    buf << in.rdbuf();

    nlslab::ExperimentConfig cfg;
    try {
        cfg = nlslab::parse_config(buf.str());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    if (!out_dir.empty()) cfg.out_dir = out_dir;

    if (validate_only) {
        std::cout << nlslab::serialize_config(cfg);
        return 0;
    }

    nlslab::RunManifest man = nlslab::run_experiment(cfg);
    if (!man.failure.empty()) {
        std::cerr << "experiment failed: " << man.failure << "\n";
        std::cerr << "partial artifacts and a failure manifest are in " << cfg.out_dir << "\n";
        return 1;
    }
    for (const auto& c : man.criteria)
        std::printf("%-28s %-5s %.6g  (%s)\n", c.name.c_str(), c.pass ? "PASS" : "FAIL", c.value,
                    c.requirement.c_str());
    std::printf("wall clock: %.1f s; manifest: %s/manifest.json\n", man.wall_clock_s,
                cfg.out_dir.c_str());
    return man.all_pass() ? 0 : 1;
}
