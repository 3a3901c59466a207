#include "nlslab/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <random>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "nlslab/boundstate.hpp"
#include "nlslab/evolution.hpp"
#include "nlslab/jost.hpp"

namespace nlslab {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

const std::vector<std::string> kExperimentNames = {
    "scattering-audit",   "linear-decay",  "soliton-stability",
    "modified-scattering", "model-problem", "boundstate-branch"};

// ---------------------------------------------------------------------------
// configuration

ExperimentConfig default_config(const std::string& experiment) {
    ExperimentConfig c;
    c.experiment = experiment;
    if (experiment == "scattering-audit") {
        c.half_width = 100.0;
        c.n_points = 2048;
        c.band_limit = 8.0;
        c.m_points = 512;
    } else if (experiment == "linear-decay") {
        c.half_width = 200.0;
        c.n_points = 4096;
        c.band_limit = 2.0;
        c.m_points = 512;
        c.recipe = "freq_packet";
        c.fit_t_min = 10.0;
        c.fit_t_max = 100.0;
        c.t_end = 200.0;
    } else if (experiment == "soliton-stability") {
        c.half_width = 400.0;
        c.n_points = 4096;
        c.band_limit = 2.0;
        c.m_points = 512;
        c.recipe = "soliton_plus_packet";
        c.epsilon = 0.05;
        c.width = 7.0;
        // skip the quadratic-in-radiation transient (t^{-2.8} up to t ~ 40)
        c.fit_t_min = 40.0;
        c.fit_t_max = 200.0;
    } else if (experiment == "modified-scattering") {
        c.half_width = 400.0;
        c.n_points = 4096;
        c.band_limit = 2.0;
        c.m_points = 512;
        c.recipe = "packet";
        c.epsilon = 0.2;
        c.width = 9.0;
        c.fit_t_min = 25.0;
        c.fit_t_max = 200.0;
    } else if (experiment == "model-problem") {
        c.potential.preset = "bump";
        // modest height: the packet sits on the bump, and the distorted
        // content it inherits at k of order 1 scales with the bump's Fourier
        // tail; a unit bump puts enough fast mass in play that wall bounces
        // re-scatter through the static couplings and jitter the profile
        c.potential.amplitude = 0.1;
        c.half_width = 400.0;
        c.n_points = 4096;
        c.band_limit = 2.0;
        c.m_points = 512;
        c.recipe = "packet";
        c.epsilon = 0.05;
        c.width = 12.0;
        c.fit_t_min = 10.0;
        c.fit_t_max = 200.0;
    } else if (experiment == "boundstate-branch") {
        c.half_width = 40.0;
        c.n_points = 768;
        c.band_limit = 6.0;
        c.m_points = 256;
        c.dt = 0.005;
        c.t_end = 20.0;
        c.snapshot_stride = 400;
    } else {
        throw std::invalid_argument("unknown experiment: " + experiment);
    }
    return c;
}

Potential make_potential(const PotentialConfig& pc) {
    if (pc.preset == "gaussian_well") return Potential::gaussian_well(pc.amplitude, pc.width);
    if (pc.preset == "sech2") return Potential::sech2(pc.amplitude, pc.width);
    if (pc.preset == "bump") return Potential::bump(pc.amplitude, pc.width);
    throw std::invalid_argument("unknown potential preset: " + pc.preset);
}

namespace {

void validate(const ExperimentConfig& c) {
    auto fail = [](const std::string& m) { throw std::invalid_argument("config: " + m); };
    if (std::find(kExperimentNames.begin(), kExperimentNames.end(), c.experiment) ==
        kExperimentNames.end())
        fail("unknown experiment '" + c.experiment + "'");
    make_potential(c.potential);
    if (c.half_width < 20.0) fail("grid/half_width must be >= 20");
    if (c.n_points < 64 || c.n_points % 2 != 0) fail("grid/n_points must be even and >= 64");
    if (c.band_limit <= 0.0) fail("frequency/band_limit must be positive");
    if (c.m_points < 16) fail("frequency/m_points must be >= 16");
    if (!(c.epsilon > 0.0) || c.epsilon > 0.2) fail("evolution/epsilon must be in (0, 0.2]");
    if (!(c.dt > 0.0)) fail("evolution/dt must be positive");
    if (!(c.t_end > 0.0)) fail("evolution/t_end must be positive");
    if (c.snapshot_stride < 1) fail("evolution/snapshot_stride must be >= 1");
    if (c.recipe != "packet" && c.recipe != "freq_packet" && c.recipe != "soliton_plus_packet")
        fail("unknown initial_data/recipe '" + c.recipe + "'");
    if (!(c.width > 0.0)) fail("initial_data/width must be positive");
    if (!(c.freq_sigma > 0.0)) fail("initial_data/freq_sigma must be positive");
    if (std::abs(c.z0) > kBoundStateDeltaMax) fail("initial_data/z0 outside the soliton regime");
    if (!(c.alpha > 0.0) || c.alpha > 1.0 / 3.0) fail("analysis/alpha must be in (0, 1/3]");
    if (!(c.fit_t_min > 0.0) || c.fit_t_min >= c.fit_t_max)
        fail("analysis fit window must satisfy 0 < fit_t_min < fit_t_max");
    if (!(c.gap_k_max > 0.0)) fail("analysis/gap_k_max must be positive");
    if (c.out_dir.empty()) fail("out_dir must be nonempty");
}

[[noreturn]] void unknown_key(const std::string& path) {
    throw std::invalid_argument("config: unknown key at " + path);
}

double num_at(const json& j, const std::string& path) {
    if (!j.is_number()) throw std::invalid_argument("config: expected a number at " + path);
    return j.get<double>();
}

int int_at(const json& j, const std::string& path) {
    if (!j.is_number_integer()) throw std::invalid_argument("config: expected an integer at " + path);
    return j.get<int>();
}

std::string str_at(const json& j, const std::string& path) {
    if (!j.is_string()) throw std::invalid_argument("config: expected a string at " + path);
    return j.get<std::string>();
}

} // namespace

ExperimentConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("config: malformed document: ") + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");
    if (!j.contains("experiment"))
        throw std::invalid_argument("config: missing required key /experiment");

    ExperimentConfig c = default_config(str_at(j["experiment"], "/experiment"));

    for (auto& [key, val] : j.items()) {
        if (key == "experiment") {
            continue;
        } else if (key == "potential") {
            for (auto& [k2, v2] : val.items()) {
                std::string p = "/potential/" + k2;
                if (k2 == "preset") c.potential.preset = str_at(v2, p);
                else if (k2 == "amplitude") c.potential.amplitude = num_at(v2, p);
                else if (k2 == "width") c.potential.width = num_at(v2, p);
                else unknown_key(p);
            }
        } else if (key == "grid") {
            for (auto& [k2, v2] : val.items()) {
                std::string p = "/grid/" + k2;
                if (k2 == "half_width") c.half_width = num_at(v2, p);
                else if (k2 == "n_points") c.n_points = int_at(v2, p);
                else unknown_key(p);
            }
        } else if (key == "frequency") {
            for (auto& [k2, v2] : val.items()) {
                std::string p = "/frequency/" + k2;
                if (k2 == "band_limit") c.band_limit = num_at(v2, p);
                else if (k2 == "m_points") c.m_points = int_at(v2, p);
                else unknown_key(p);
            }
        } else if (key == "evolution") {
            for (auto& [k2, v2] : val.items()) {
                std::string p = "/evolution/" + k2;
                if (k2 == "epsilon") c.epsilon = num_at(v2, p);
                else if (k2 == "dt") c.dt = num_at(v2, p);
                else if (k2 == "t_end") c.t_end = num_at(v2, p);
                else if (k2 == "snapshot_stride") c.snapshot_stride = int_at(v2, p);
                else unknown_key(p);
            }
        } else if (key == "initial_data") {
            for (auto& [k2, v2] : val.items()) {
                std::string p = "/initial_data/" + k2;
                if (k2 == "recipe") c.recipe = str_at(v2, p);
                else if (k2 == "z0") c.z0 = num_at(v2, p);
                else if (k2 == "center") c.center = num_at(v2, p);
                else if (k2 == "velocity") c.velocity = num_at(v2, p);
                else if (k2 == "width") c.width = num_at(v2, p);
                else if (k2 == "freq_center") c.freq_center = num_at(v2, p);
                else if (k2 == "freq_sigma") c.freq_sigma = num_at(v2, p);
                else unknown_key(p);
            }
        } else if (key == "analysis") {
            for (auto& [k2, v2] : val.items()) {
                std::string p = "/analysis/" + k2;
                if (k2 == "alpha") c.alpha = num_at(v2, p);
                else if (k2 == "fit_t_min") c.fit_t_min = num_at(v2, p);
                else if (k2 == "fit_t_max") c.fit_t_max = num_at(v2, p);
                else if (k2 == "probe_k") c.probe_k = num_at(v2, p);
                else if (k2 == "gap_k_max") c.gap_k_max = num_at(v2, p);
                else unknown_key(p);
            }
        } else if (key == "seed") {
            c.seed = val.is_number_unsigned() || val.is_number_integer()
                         ? val.get<std::uint64_t>()
                         : throw std::invalid_argument("config: expected an integer at /seed");
        } else if (key == "out_dir") {
            c.out_dir = str_at(val, "/out_dir");
        } else {
            unknown_key("/" + key);
        }
    }
    validate(c);
    return c;
}

std::string serialize_config(const ExperimentConfig& c) {
    json j;
    j["experiment"] = c.experiment;
    j["potential"] = {{"preset", c.potential.preset},
                      {"amplitude", c.potential.amplitude},
                      {"width", c.potential.width}};
    j["grid"] = {{"half_width", c.half_width}, {"n_points", c.n_points}};
    j["frequency"] = {{"band_limit", c.band_limit}, {"m_points", c.m_points}};
    j["evolution"] = {{"epsilon", c.epsilon},
                      {"dt", c.dt},
                      {"t_end", c.t_end},
                      {"snapshot_stride", c.snapshot_stride}};
    j["initial_data"] = {{"recipe", c.recipe},     {"z0", c.z0},
                         {"center", c.center},     {"velocity", c.velocity},
                         {"width", c.width},       {"freq_center", c.freq_center},
                         {"freq_sigma", c.freq_sigma}};
    j["analysis"] = {{"alpha", c.alpha},
                     {"fit_t_min", c.fit_t_min},
                     {"fit_t_max", c.fit_t_max},
                     {"probe_k", c.probe_k},
                     {"gap_k_max", c.gap_k_max}};
    j["seed"] = c.seed;
    j["out_dir"] = c.out_dir;
    return j.dump(2) + "\n";
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
    return serialize_config(a) == serialize_config(b);
}

// ---------------------------------------------------------------------------
// manifest

bool RunManifest::all_pass() const {
    if (!failure.empty()) return false;
    for (const auto& c : criteria)
        if (!c.pass) return false;
    return !criteria.empty();
}

const CriterionResult& RunManifest::at(const std::string& name) const {
    for (const auto& c : criteria)
        if (c.name == name) return c;
    throw std::out_of_range("manifest has no criterion named " + name);
}

std::string RunManifest::to_json() const {
    json j;
    j["experiment"] = experiment;
    j["code_version"] = code_version;
    j["status"] = failure.empty() ? (all_pass() ? "pass" : "fail") : "failed";
    if (!failure.empty()) j["failure"] = failure;
    j["wall_clock_s"] = wall_clock_s;
    j["config"] = json::parse(config_echo);
    j["criteria"] = json::array();
    for (const auto& c : criteria)
        j["criteria"].push_back(
            {{"name", c.name}, {"value", c.value}, {"requirement", c.requirement}, {"pass", c.pass}});
    return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// shared machinery

namespace {

const SpectralDecomposition& cached_dec(const PotentialConfig& pc, double L, int n) {
    static std::map<std::string, std::unique_ptr<SpectralDecomposition>> cache;
    char key[160];
    std::snprintf(key, sizeof key, "%s/%.17g/%.17g/%.17g/%d", pc.preset.c_str(), pc.amplitude,
                  pc.width, L, n);
    auto it = cache.find(key);
    if (it == cache.end())
        it = cache.emplace(key, std::make_unique<SpectralDecomposition>(make_potential(pc),
                                                                        SpatialGrid(L, n)))
                 .first;
    return *it->second;
}

const DistortedTransform& cached_tf(const PotentialConfig& pc, double L, int n, double K, int m) {
    static std::map<std::string, std::unique_ptr<DistortedTransform>> cache;
    char key[200];
    std::snprintf(key, sizeof key, "%s/%.17g/%.17g/%.17g/%d/%.17g/%d", pc.preset.c_str(),
                  pc.amplitude, pc.width, L, n, K, m);
    auto it = cache.find(key);
    if (it == cache.end())
        it = cache.emplace(key, std::make_unique<DistortedTransform>(
                                    make_potential(pc), SpatialGrid(L, n), FrequencyGrid(K, m)))
                 .first;
    return *it->second;
}

struct Csv {
    std::ofstream out;
    Csv(const fs::path& dir, const std::string& name, const std::string& header)
        : out(dir / name) {
        if (!out) throw std::runtime_error("cannot open " + (dir / name).string());
        out << header << "\n";
    }
    void row(const std::vector<double>& vals) {
        char buf[32];
        for (size_t i = 0; i < vals.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", vals[i]);
            out << (i ? "," : "") << buf;
        }
        out << "\n";
    }
};

void push(RunManifest& m, const std::string& name, double value, const std::string& req,
          bool pass) {
    m.criteria.push_back({name, value, req, pass});
}

ComplexField gaussian_packet(const SpatialGrid& g, double amp, double x0, double k0, double w) {
    return ComplexField(g, [=](double x) {
        double s = (x - x0) / w;
        return amp * std::exp(-s * s) * std::exp(complexd(0.0, k0 * x));
    });
}

ComplexField freq_packet(const DistortedTransform& tf, double k0, double sigma) {
    const FrequencyGrid& kg = tf.kgrid();
    std::vector<complexd> g(kg.m_points);
    for (int i = 0; i < kg.m_points; ++i) {
        double k = kg.k(i);
        g[i] = std::exp(-(k - k0) * (k - k0) / (2.0 * sigma * sigma));
    }
    return tf.inverse(g);
}

// least squares y = a + b * log(t); returns b
double log_slope(const std::vector<double>& t, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = (int)t.size();
    for (int i = 0; i < n; ++i) {
        double x = std::log(t[i]);
        sx += x;
        sy += y[i];
        sxx += x * x;
        sxy += x * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::vector<double> unwrap_phase(const std::vector<complexd>& z) {
    std::vector<double> phi(z.size());
    double prev = 0.0, offset = 0.0;
    for (size_t i = 0; i < z.size(); ++i) {
        double a = std::arg(z[i]);
        if (i > 0) {
            while (a + offset - prev > M_PI) offset -= 2.0 * M_PI;
            while (a + offset - prev < -M_PI) offset += 2.0 * M_PI;
        }
        phi[i] = a + offset;
        prev = phi[i];
    }
    return phi;
}

// dyadic profile gaps over one fixed band k_lo <= |k| <= k_hi: the same k-set
// for every pair, so the sequence measures convergence rather than band
// growth; callers keep k_hi below the wall-reflection range L / (2 t_end)
std::vector<std::pair<double, double>> banded_gaps(const ProfileSeries& series, double k_lo,
                                                   double k_hi) {
    std::vector<std::pair<double, double>> out;
    int m = series.kgrid.m_points;
    for (size_t i = 0; i < series.times.size(); ++i) {
        double T = series.times[i];
        if (T <= 0.0) continue;
        for (size_t l = i + 1; l < series.times.size(); ++l) {
            if (std::abs(series.times[l] - 2.0 * T) > 1e-9 * (1.0 + T)) continue;
            double gap = 0.0;
            for (int j = 0; j < m; ++j) {
                double ak = std::abs(series.kgrid.k(j));
                if (ak < k_lo || ak > k_hi) continue;
                gap = std::max(gap, std::abs(series.w[l][j] - series.w[i][j]));
            }
            out.emplace_back(T, gap);
        }
    }
    return out;
}

int probe_node(const FrequencyGrid& kg, const std::vector<complexd>& W, double requested) {
    int best = -1;
    double best_val = -1.0;
    for (int i = 0; i < kg.m_points; ++i) {
        double k = kg.k(i);
        if (requested > 0.0) {
            if (best < 0 || std::abs(k - requested) < std::abs(kg.k(best) - requested)) best = i;
        } else if (k >= 0.15 && k <= 1.0 && std::abs(W[i]) > best_val) {
            best_val = std::abs(W[i]);
            best = i;
        }
    }
    if (best < 0) throw std::runtime_error("no probe node in band");
    return best;
}

// profile bookkeeping shared by the scattering-style experiments:
// dyadic Cauchy gaps at T in {25,50,100}, the log-phase drift at the probe
// against (1/2)|W_inf|^2 log t, and |f|(t, probe) constancy over [25, t_end]
void profile_criteria(RunManifest& man, ProfileSeries& series, const ExperimentConfig& cfg,
                      const fs::path& dir) {
    ModifiedProfile mp = modified_profile(series, cfg.alpha);
    // fixed comparison band: cutoff frozen at the smallest gated T
    double k_lo = std::pow(25.0, -3.0 * cfg.alpha);
    double k_hi = std::min(cfg.gap_k_max, 0.9 * cfg.half_width / (2.0 * cfg.t_end));

    Csv gaps(dir, "gaps.csv", "T,gap");
    std::vector<double> sel;
    for (const auto& g : banded_gaps(series, k_lo, k_hi)) {
        gaps.row({g.first, g.second});
        for (double T : {25.0, 50.0, 100.0})
            if (std::abs(g.first - T) < 1e-9) sel.push_back(g.second);
    }
    bool gaps_ok = sel.size() == 3 && sel[0] > sel[1] && sel[1] > sel[2];
    push(man, "cauchy_gaps_decreasing", sel.size() == 3 ? sel[2] / sel[0] : -1.0,
         "gaps at T=25,50,100 strictly decreasing", gaps_ok);

    int ip = probe_node(series.kgrid, mp.W_inf, cfg.probe_k);
    double k0 = series.kgrid.k(ip);
    double half_w2 = 0.5 * std::norm(mp.W_inf[ip]);

    std::vector<double> ts;
    std::vector<complexd> fs;
    double f_ref = 0.0, const_dev = 0.0;
    Csv probe(dir, "probe.csv", "t,abs_f,arg_f");
    for (size_t i = 0; i < series.times.size(); ++i) {
        double t = series.times[i];
        if (t < 25.0) continue;
        complexd f = series.f[i][ip];
        ts.push_back(t);
        fs.push_back(f);
        probe.row({t, std::abs(f), std::arg(f)});
        if (f_ref == 0.0) f_ref = std::abs(f);
        const_dev = std::max(const_dev, std::abs(std::abs(f) / f_ref - 1.0));
    }
    double slope = log_slope(ts, unwrap_phase(fs));
    double drift_rel = std::abs(-slope - half_w2) / half_w2;
    push(man, "phase_drift_rel", drift_rel,
         "log-t phase slope matches (1/2)|W(k0)|^2 within 30% (k0=" + std::to_string(k0) + ")",
         drift_rel < 0.3);
    push(man, "profile_constancy", const_dev, "| |f(t,k0)| / |f(25,k0)| - 1 | < 0.1 on [25,t_end]",
         const_dev < 0.1);

    Csv prof(dir, "profile.csv", "k,abs_W_inf");
    for (int i = 0; i < series.kgrid.m_points; ++i)
        prof.row({series.kgrid.k(i), std::abs(mp.W_inf[i])});
}

// ---------------------------------------------------------------------------
// experiments

void run_scattering_audit(const ExperimentConfig& cfg, RunManifest& man, const fs::path& dir) {
    auto t_start = std::chrono::steady_clock::now();
    SpatialGrid grid(cfg.half_width, cfg.n_points);
    FrequencyGrid kgrid(cfg.band_limit, cfg.m_points);
    Potential V = make_potential(cfg.potential);

    JostSolution jost = solve_jost(V, grid, kgrid);
    ScatteringData sc = compute_scattering(jost, V, grid);
    push(man, "unitarity_defect", sc.unitarity_defect, "< 1e-6", sc.unitarity_defect < 1e-6);
    push(man, "cross_identity_defect", sc.cross_defect, "< 1e-6", sc.cross_defect < 1e-6);

    Csv csv(dir, "scattering.csv", "k,re_T,im_T,abs_T,abs_R_plus,abs_R_minus");
    for (int i = 0; i < kgrid.m_points; ++i)
        csv.row({kgrid.k(i), sc.T[i].real(), sc.T[i].imag(), std::abs(sc.T[i]),
                 std::abs(sc.R_plus[i]), std::abs(sc.R_minus[i])});

    // reflectionless oracle: m+ = (k + i tanh x)/(k + i) for V = -2 sech^2 x
    Potential refl = Potential::sech2(2.0, 1.0);
    JostSolution jr = solve_jost(refl, grid, kgrid);
    double m_err = 0.0, r_sup = 0.0;
    for (int i = 0; i < kgrid.m_points; ++i) {
        complexd k(kgrid.k(i), 0.0);
        for (int j = 0; j < grid.n_points; j += 8) {
            complexd exact = (k + complexd(0.0, 1.0) * std::tanh(grid.x(j))) / (k + complexd(0.0, 1.0));
            m_err = std::max(m_err, std::abs(jr.at(i).m_plus[j] - exact));
        }
    }
    ScatteringData sr = compute_scattering(jr, refl, grid);
    for (int i = 0; i < kgrid.m_points; ++i) r_sup = std::max(r_sup, std::abs(sr.R_plus[i]));
    push(man, "sech2_jost_sup_error", m_err, "< 1e-6", m_err < 1e-6);
    push(man, "sech2_reflectivity", r_sup, "< 1e-6", r_sup < 1e-6);

    GenericityResult gg = check_generic(V, grid);
    GenericityResult gr = check_generic(refl, grid);
    push(man, "gaussian_generic", std::abs(gg.value), "flagged generic", gg.is_generic);
    push(man, "sech2_nongeneric", std::abs(gr.value), "flagged non-generic", !gr.is_generic);

    // small-k law |T(k)|/|k| -> |alpha| over the 5 smallest positive nodes
    std::vector<double> ratios;
    for (int i = 0; i < kgrid.m_points && ratios.size() < 5; ++i)
        if (kgrid.k(i) > 0.0) ratios.push_back(std::abs(sc.T[i]) / kgrid.k(i));
    double rmin = *std::min_element(ratios.begin(), ratios.end());
    double rmax = *std::max_element(ratios.begin(), ratios.end());
    double spread = rmax / rmin - 1.0;
    push(man, "smallk_law_spread", spread, "|T|/|k| constant within 5%, nonzero",
         spread < 0.05 && rmin > 0.0);

    // distorted transform defects on a wavepacket
    const DistortedTransform& tf = cached_tf(cfg.potential, cfg.half_width, cfg.n_points,
                                             cfg.band_limit, cfg.m_points);
    const SpectralDecomposition& dec = cached_dec(cfg.potential, 40.0, 768);
    ComplexField u = gaussian_packet(grid, 1.0, -8.0, 0.4, 3.0);
    std::vector<complexd> ut = tf.forward(u);
    ComplexField pc = u;
    { // continuum projection via the small-grid ground state is unavailable on
      // this grid; subtract the bound component with a locally computed mode
        SpectralDecomposition big(V, grid);
        pc = big.project_continuous(u);
        double nf = 0.0;
        for (const complexd& z : ut) nf += std::norm(z);
        nf = std::sqrt(nf * kgrid.spacing);
        double plancherel = std::abs(nf - l2_norm(pc)) / l2_norm(pc);
        push(man, "plancherel_defect", plancherel, "< 1e-4 relative", plancherel < 1e-4);

        std::vector<complexd> hu = tf.forward(big.apply_H(pc));
        double diag = 0.0;
        for (int i = 0; i < kgrid.m_points; ++i)
            diag += std::norm(hu[i] - kgrid.k(i) * kgrid.k(i) * ut[i]);
        diag = std::sqrt(diag * kgrid.spacing);
        push(man, "diagonalization_defect", diag, "< 1e-3", diag < 1e-3);

        double rt = l2_norm(tf.inverse(ut) - pc);
        push(man, "roundtrip_defect", rt, "< 1e-4", rt < 1e-4);

        push(man, "negative_eigenvalues", big.n_bound(), "exactly one", big.n_bound() == 1);
        double rho2 = shoot_ground_state(V, cfg.half_width, cfg.n_points);
        double rho_diff = std::abs(rho2 - big.rho_squared());
        push(man, "shooting_rho2_diff", rho_diff, "< 1e-6", rho_diff < 1e-6);
        const ComplexField& phi = big.ground_state();
        double eig_res = l2_norm(big.apply_H(phi) + big.rho_squared() * phi);
        push(man, "eigenpair_residual", eig_res, "< 1e-8", eig_res < 1e-8);
    }
    (void)dec;

    // free transform reduces to the flat Fourier transform
    {
        SpatialGrid g0(40.0, 768);
        std::vector<double> zeros(768, 0.0);
        DistortedTransform tf0(Potential::tabulated(g0, zeros), g0, FrequencyGrid(4.0, 128));
        ComplexField h = gaussian_packet(g0, 1.0, 0.0, 0.5, 3.0);
        std::vector<complexd> got = tf0.forward(h);
        double flat = 0.0;
        for (int i = 0; i < 128; ++i) {
            double k = tf0.kgrid().k(i);
            complexd ref(0.0, 0.0);
            for (int j = 0; j < 768; ++j)
                ref += h[j] * std::exp(complexd(0.0, -k * g0.x(j)));
            ref *= g0.spacing / std::sqrt(2.0 * M_PI);
            flat = std::max(flat, std::abs(got[i] - ref));
        }
        push(man, "free_transform_flat", flat, "< 1e-8", flat < 1e-8);
    }

    // seeded random probes of the identities, recorded for determinism checks
    std::mt19937_64 rng(cfg.seed);
    std::uniform_int_distribution<int> pick(0, kgrid.m_points - 1);
    Csv probes(dir, "probes.csv", "k,unitarity,cross");
    for (int p = 0; p < 16; ++p) {
        int i = pick(rng);
        double uni = std::abs(std::norm(sc.T[i]) + std::norm(sc.R_plus[i]) - 1.0);
        double cross = std::abs(sc.T[i] * std::conj(sc.R_minus[i]) +
                                std::conj(sc.T[i]) * sc.R_plus[i]);
        probes.row({kgrid.k(i), uni, cross});
    }

    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    push(man, "runtime_s", secs, "< 60", secs < 60.0);
}

void run_linear_decay(const ExperimentConfig& cfg, RunManifest& man, const fs::path& dir) {
    const DistortedTransform& tf =
        cached_tf(cfg.potential, cfg.half_width, cfg.n_points, cfg.band_limit, cfg.m_points);
    ComplexField h = cfg.recipe == "freq_packet"
                         ? freq_packet(tf, cfg.freq_center, cfg.freq_sigma)
                         : gaussian_packet(tf.grid(), cfg.epsilon, cfg.center, cfg.velocity,
                                           cfg.width);

    std::vector<double> times;
    std::vector<ComplexField> etas;
    for (double t = cfg.fit_t_min; t <= cfg.fit_t_max + 1e-9; t += 5.0) {
        times.push_back(t);
        etas.push_back(tf.propagate(h, t));
    }
    DecayDiagnostics d = decay_diagnostics(times, etas);
    Csv csv(dir, "decay.csv", "t,sup,weighted_sup,weighted_deriv");
    for (size_t i = 0; i < times.size(); ++i)
        csv.row({times[i], d.sup[i], d.weighted_sup[i], d.weighted_deriv[i]});

    PowerLawFit fs = fit_power_law(d.times, d.sup, cfg.fit_t_min, cfg.fit_t_max);
    PowerLawFit fw = fit_power_law(d.times, d.weighted_sup, cfg.fit_t_min, cfg.fit_t_max);
    PowerLawFit fd = fit_power_law(d.times, d.weighted_deriv, cfg.fit_t_min, cfg.fit_t_max);
    push(man, "sup_exponent", fs.exponent, "in [-0.6, -0.4]",
         fs.exponent > -0.6 && fs.exponent < -0.4);
    push(man, "weighted_sup_exponent", fw.exponent, "in [-1.2, -0.8]",
         fw.exponent > -1.2 && fw.exponent < -0.8);
    push(man, "weighted_deriv_exponent", fd.exponent, "in [-1.2, -0.8]",
         fd.exponent > -1.2 && fd.exponent < -0.8);

    // cumulative smoothing functional on a denser long series
    std::vector<double> st;
    std::vector<ComplexField> se;
    for (double t = 2.0; t <= cfg.t_end + 1e-9; t += 4.0) {
        st.push_back(t);
        se.push_back(tf.propagate(h, t));
    }
    DecayDiagnostics ds = decay_diagnostics(st, se);
    Csv scsv(dir, "smoothing.csv", "t,smoothing");
    double at_half = 0.0;
    for (size_t i = 0; i < st.size(); ++i) {
        scsv.row({st[i], ds.smoothing[i]});
        if (st[i] <= cfg.t_end / 2.0) at_half = ds.smoothing[i];
    }
    double ratio = ds.smoothing.back() / at_half;
    push(man, "smoothing_saturation", ratio, "T_end vs T_end/2 ratio < 1.1", ratio < 1.1);

    // t-weighted low/high functionals, reported alongside
    SmoothingFunctionals sfa = linear_smoothing_functionals(h, tf, 75.0, 1.0);
    SmoothingFunctionals sfb = linear_smoothing_functionals(h, tf, 150.0, 1.0);
    Csv icsv(dir, "impsm.csv", "t_max,low_j1,low_j2,high_j0,high_j1");
    icsv.row({75.0, sfa.low_j1, sfa.low_j2, sfa.high_j0, sfa.high_j1});
    icsv.row({150.0, sfb.low_j1, sfb.low_j2, sfb.high_j0, sfb.high_j1});
}

Trajectory evolve_and_dump(const ComplexField& u0, const ExperimentConfig& cfg,
                           const SpectralDecomposition& dec, const fs::path& dir) {
    EvolutionConfig ec;
    ec.variant = FullNLS{1.0};
    ec.dt = cfg.dt;
    ec.t_end = cfg.t_end;
    ec.snapshot_stride = cfg.snapshot_stride;
    // a packet sitting on the potential carries percent-level distorted
    // content at k of order 1 (set by the potential's own Fourier decay, not
    // the packet width), so a real far field reaches the box edge well before
    // t_end; the strict linear-flow default would abort a healthy run
    ec.boundary_tolerance = 5e-2;
    Trajectory traj = evolve(u0, ec, dec);
    traj.write_conserved_csv((dir / "conserved.csv").string());
    return traj;
}

void run_soliton_stability(const ExperimentConfig& cfg, RunManifest& man, const fs::path& dir) {
    const SpectralDecomposition& dec = cached_dec(cfg.potential, cfg.half_width, cfg.n_points);
    const DistortedTransform& tf =
        cached_tf(cfg.potential, cfg.half_width, cfg.n_points, cfg.band_limit, cfg.m_points);

    complexd z0(cfg.z0, 0.0);
    NonlinearBoundState bs = solve_nonlinear_bound_state(z0, dec);
    ComplexField pert = dec.project_continuous(
        gaussian_packet(dec.grid(), cfg.epsilon, cfg.center, cfg.velocity, cfg.width));
    ComplexField u0 = bs.Q + projection_comparison(z0, pert, dec).mapped;

    Trajectory traj = evolve_and_dump(u0, cfg, dec, dir);

    // relative mass drift over [0, 100]
    double drift = 0.0;
    for (size_t i = 0; i < traj.times.size(); ++i)
        if (traj.times[i] <= 100.0)
            drift = std::max(drift, std::abs(traj.mass[i] / traj.mass[0] - 1.0));
    push(man, "mass_drift", drift, "< 1e-9 relative over [0,100]", drift < 1e-9);

    ModulationPath path = track_modulation(traj, dec);
    path.write_csv((dir / "modulation.csv").string());

    std::vector<double> times, sup_eta, ortho, defect_rhs, absz;
    for (size_t i = 0; i < path.states.size(); ++i) {
        const ModulationState& s = path.states[i];
        times.push_back(s.t);
        sup_eta.push_back(sup_norm(s.eta));
        ortho.push_back(std::abs(s.ortho_residual[0]) + std::abs(s.ortho_residual[1]));
        defect_rhs.push_back(path.defect_rhs[i]);
        absz.push_back(std::abs(s.z));
    }
    Csv rad(dir, "radiation.csv", "t,sup_eta,ortho_residual,defect_rhs,abs_z");
    for (size_t i = 0; i < times.size(); ++i)
        rad.row({times[i], sup_eta[i], ortho[i], defect_rhs[i], absz[i]});

    PowerLawFit fe = fit_power_law(times, sup_eta, cfg.fit_t_min, cfg.fit_t_max);
    push(man, "eta_sup_exponent", fe.exponent, "in [-0.65, -0.35]",
         fe.exponent > -0.65 && fe.exponent < -0.35);

    double ortho_max = *std::max_element(ortho.begin(), ortho.end());
    push(man, "ortho_residual_max", ortho_max, "< 1e-9", ortho_max < 1e-9);

    PowerLawFit fdft = fit_power_law(times, defect_rhs, cfg.fit_t_min, cfg.fit_t_max);
    push(man, "modulation_defect_exponent", fdft.exponent, "in [-2.4, -1.4]",
         fdft.exponent > -2.4 && fdft.exponent < -1.4);

    auto z_at = [&](double T) {
        for (size_t i = 0; i < times.size(); ++i)
            if (std::abs(times[i] - T) < 1e-9) return absz[i];
        throw std::runtime_error("snapshot grid misses t = " + std::to_string(T));
    };
    double d1 = std::abs(z_at(50) - z_at(25));
    double d2 = std::abs(z_at(100) - z_at(50));
    double d3 = std::abs(z_at(200) - z_at(100));
    push(man, "z_dyadic_decreasing", d3 / std::max(d1, 1e-300),
         "||z(T)|-|z(T/2)|| decreasing for T=50,100,200", d1 > d2 && d2 > d3);

    // radiation profile gaps, recorded for inspection (not gated: criterion 9
    // judges the modulation quantities; the radiation band above k_cap mixes
    // in wall reflections)
    std::vector<ComplexField> etas;
    for (const auto& s : path.states) etas.push_back(s.eta);
    ProfileSeries series = make_profile_series(times, etas, tf, &dec);
    modified_profile(series, cfg.alpha);
    double k_lo = std::pow(25.0, -3.0 * cfg.alpha);
    double k_hi = std::min(cfg.gap_k_max, 0.9 * cfg.half_width / (2.0 * cfg.t_end));
    Csv gaps(dir, "gaps.csv", "T,gap");
    for (const auto& g : banded_gaps(series, k_lo, k_hi)) gaps.row({g.first, g.second});
}

void run_modified_scattering(const ExperimentConfig& cfg, RunManifest& man, const fs::path& dir) {
    const SpectralDecomposition& dec = cached_dec(cfg.potential, cfg.half_width, cfg.n_points);
    const DistortedTransform& tf =
        cached_tf(cfg.potential, cfg.half_width, cfg.n_points, cfg.band_limit, cfg.m_points);

    ComplexField u0 = dec.project_continuous(
        gaussian_packet(dec.grid(), cfg.epsilon, cfg.center, cfg.velocity, cfg.width));
    Trajectory traj = evolve_and_dump(u0, cfg, dec, dir);

    ProfileSeries series = make_profile_series(traj.times, traj.snapshots, tf, &dec);
    profile_criteria(man, series, cfg, dir);

    // cubic resonance on a band clear of the small-k cutoff
    double k_lo = 0.25, k_hi = 0.45;
    ResonanceCheck rc =
        cubic_resonance_check(traj.times, traj.snapshots, series, k_lo, k_hi, tf, &dec, cfg.alpha);
    Csv rcsv(dir, "resonance.csv", "t,deviation,main_term");
    for (size_t i = 0; i < rc.times.size(); ++i)
        rcsv.row({rc.times[i], rc.deviation[i], rc.main_term[i]});
    PowerLawFit fr = fit_power_law(rc.times, rc.deviation, cfg.fit_t_min, cfg.fit_t_max);
    push(man, "resonance_exponent", fr.exponent, "< -1.05", fr.exponent < -1.05);
    push(man, "resonance_r2", fr.r2, "> 0.9", fr.r2 > 0.9);
}

void run_model_problem(const ExperimentConfig& cfg, RunManifest& man, const fs::path& dir) {
    SpatialGrid grid(cfg.half_width, cfg.n_points);
    Potential base = make_potential(cfg.potential);
    auto a_coeff = [](double x) { return 0.01 * std::exp(-x * x / 4.0); };
    // a1 u is a static localized linear term: fold it into the Hamiltonian so
    // the distorted basis is the one the solution actually scatters against
    // (keeping a1 on the right-hand side leaves a secular phase drift in the
    // profile at rate <psi_k, a1 psi_k> that no cubic correction removes)
    std::vector<double> veff(grid.n_points);
    for (int j = 0; j < grid.n_points; ++j) veff[j] = base(grid.x(j)) + a_coeff(grid.x(j));
    Potential V = Potential::tabulated(grid, veff);
    SpectralDecomposition dec(V, grid);
    DistortedTransform tf(V, grid, FrequencyGrid(cfg.band_limit, cfg.m_points));
    push(man, "no_bound_state", dec.n_bound(), "bump potential has no eigenvalue",
         dec.n_bound() == 0);

    ComplexField u0 = dec.project_continuous(
        gaussian_packet(grid, cfg.epsilon, cfg.center, cfg.velocity, cfg.width));

    ModelEquation model;
    auto bumpc = [&](double amp) {
        return ComplexField(grid,
                            [amp](double x) { return complexd(amp * std::exp(-x * x / 4.0), 0.0); });
    };
    model.a1 = bumpc(0.0);
    model.a2 = bumpc(0.01);
    model.b = bumpc(0.05);
    // stand-in for E[z_inf]; kept small enough that the a2-converted band at
    // lambda = 2|E| - lambda' (k ~ 0.84) stays clear of the wall through t_end
    model.phase_rate = [](double) { return -0.35; };

    EvolutionConfig ec;
    ec.variant = model;
    ec.dt = cfg.dt;
    ec.t_end = cfg.t_end;
    ec.snapshot_stride = cfg.snapshot_stride;
    ec.boundary_tolerance = 5e-2; // same far-field allowance as the full flow
    Trajectory traj = evolve(u0, ec, dec);
    traj.write_conserved_csv((dir / "conserved.csv").string());

    std::vector<double> sup;
    for (const auto& s : traj.snapshots) sup.push_back(sup_norm(s));
    Csv dcsv(dir, "decay.csv", "t,sup");
    for (size_t i = 0; i < traj.times.size(); ++i) dcsv.row({traj.times[i], sup[i]});
    PowerLawFit fsup = fit_power_law(traj.times, sup, cfg.fit_t_min, cfg.fit_t_max);
    push(man, "sup_exponent", fsup.exponent, "in [-0.65, -0.35]",
         fsup.exponent > -0.65 && fsup.exponent < -0.35);

    ProfileSeries series = make_profile_series(traj.times, traj.snapshots, tf, &dec);
    profile_criteria(man, series, cfg, dir);
}

void run_boundstate_branch(const ExperimentConfig& cfg, RunManifest& man, const fs::path& dir) {
    const SpectralDecomposition& dec = cached_dec(cfg.potential, cfg.half_width, cfg.n_points);
    std::mt19937_64 rng(cfg.seed);

    Csv branch(dir, "branch.csv", "abs_z,E,q_norm,residual");
    double res_max = 0.0;
    std::vector<double> e_defect; // |E + rho^2| on a halving ladder
    for (double az : {0.16, 0.08, 0.04, 0.02}) {
        NonlinearBoundState b = solve_nonlinear_bound_state(complexd(az, 0.0), dec);
        branch.row({az, b.E, l2_norm(b.q), b.residual});
        res_max = std::max(res_max, b.residual);
        e_defect.push_back(std::abs(b.E + dec.rho_squared()));
    }
    push(man, "elliptic_residual_max", res_max, "< 1e-10", res_max < 1e-10);

    bool e_dec = true;
    for (size_t i = 1; i < e_defect.size(); ++i) e_dec = e_dec && e_defect[i] < e_defect[i - 1];
    double order = std::log2(e_defect[0] / e_defect[1]); // measured convergence order
    push(man, "E_defect_order", order, "|E+rho^2| -> 0 under z-halving (order reported)", e_dec);

    std::uniform_real_distribution<double> ang(0.0, 2.0 * M_PI);
    double gamma = ang(rng);
    NonlinearBoundState b0 = solve_nonlinear_bound_state(complexd(cfg.z0, 0.0), dec);
    NonlinearBoundState bg =
        solve_nonlinear_bound_state(std::polar(cfg.z0, gamma), dec);
    double gauge = l2_norm(bg.Q - std::exp(complexd(0.0, gamma)) * b0.Q);
    push(man, "gauge_covariance", gauge, "< 1e-12", gauge < 1e-12);

    // exact solitary wave under the full flow
    EvolutionConfig ec;
    ec.variant = FullNLS{1.0};
    ec.dt = cfg.dt;
    ec.t_end = cfg.t_end;
    ec.snapshot_stride = 1000000;
    Trajectory straj = evolve(b0.Q, ec, dec);
    ComplexField ref = std::exp(complexd(0.0, b0.E * cfg.t_end)) * b0.Q;
    double prop_err = l2_norm(straj.snapshots.back() - ref);
    push(man, "soliton_propagation_error", prop_err, "< 1e-6 at t_end", prop_err < 1e-6);

    // mass conservation on a long soliton run
    EvolutionConfig mc;
    mc.variant = FullNLS{1.0};
    mc.dt = 0.02;
    mc.t_end = 100.0;
    mc.snapshot_stride = 500;
    Trajectory mtraj = evolve(b0.Q, mc, dec);
    double drift = 0.0;
    for (double m : mtraj.mass) drift = std::max(drift, std::abs(m / mtraj.mass[0] - 1.0));
    push(man, "mass_drift", drift, "< 1e-9 relative over [0,100]", drift < 1e-9);

    // conservation-selection oracle: exactly one quartic prefactor gains x4
    // under dt-halving (energy evaluated with the dense quadratic form)
    {
        ComplexField w0 = gaussian_packet(dec.grid(), 0.2, -10.0, 0.0, 3.0);
        Potential V = make_potential(cfg.potential);
        auto drift_at = [&](double dt, double c4) {
            EvolutionConfig e2;
            e2.variant = FullNLS{1.0};
            e2.dt = dt;
            e2.t_end = 4.0;
            e2.snapshot_stride = 1000000;
            Trajectory tr = evolve(w0, e2, dec);
            auto energy = [&](const ComplexField& u) {
                return conserved_quantities(u, V, c4).energy;
            };
            return std::abs(energy(tr.snapshots.back()) - energy(tr.snapshots.front()));
        };
        int winners = 0;
        double winner_c4 = 0.0;
        Csv ccsv(dir, "conservation_selection.csv", "c4,drift_coarse,drift_fine,ratio");
        for (double c4 : {0.25, 0.5, 1.0}) {
            double dc = drift_at(0.04, c4), df = drift_at(0.02, c4);
            double ratio = dc / df;
            ccsv.row({c4, dc, df, ratio});
            if (ratio > 2.5 && ratio < 5.5) {
                ++winners;
                winner_c4 = c4;
            }
        }
        push(man, "quartic_selection", winner_c4, "exactly one prefactor with x4 drift reduction",
             winners == 1);
    }

    // refined profiles at z_inf and a halving step below it
    RefinedProfiles p = solve_refined_profiles(complexd(cfg.z0, 0.0), dec);
    RefinedProfiles ph = solve_refined_profiles(complexd(cfg.z0 / 2.0, 0.0), dec);
    Csv rcsv(dir, "refined.csv", "abs_z,norm_A,norm_B,contraction,residual1,residual2");
    rcsv.row({cfg.z0, l2_norm(p.profile_a), l2_norm(p.profile_b), p.contraction, p.residual1,
              p.residual2});
    rcsv.row({cfg.z0 / 2.0, l2_norm(ph.profile_a), l2_norm(ph.profile_b), ph.contraction,
              ph.residual1, ph.residual2});
    double rres = std::max({p.residual1, p.residual2, ph.residual1, ph.residual2});
    push(man, "refined_residual_max", rres, "< 1e-8", rres < 1e-8);
    push(man, "refined_contraction", std::max(p.contraction, ph.contraction), "< 0.5",
         std::max(p.contraction, ph.contraction) < 0.5);
    double ra = l2_norm(p.profile_a) / l2_norm(ph.profile_a);
    double rb = l2_norm(p.profile_b) / l2_norm(ph.profile_b);
    bool quad = ra > 3.0 && ra < 5.0 && rb > 3.0 && rb < 5.0;
    push(man, "refined_quadratic_scaling", ra, "|z|^2 scaling under halving within 25%", quad);
}

} // namespace

RunManifest run_experiment(const ExperimentConfig& cfg) {
    validate(cfg);
    RunManifest man;
    man.experiment = cfg.experiment;
    man.config_echo = serialize_config(cfg);

    fs::path dir(cfg.out_dir);
    fs::create_directories(dir);

    auto t0 = std::chrono::steady_clock::now();
    try {
        if (cfg.experiment == "scattering-audit") run_scattering_audit(cfg, man, dir);
        else if (cfg.experiment == "linear-decay") run_linear_decay(cfg, man, dir);
        else if (cfg.experiment == "soliton-stability") run_soliton_stability(cfg, man, dir);
        else if (cfg.experiment == "modified-scattering") run_modified_scattering(cfg, man, dir);
        else if (cfg.experiment == "model-problem") run_model_problem(cfg, man, dir);
        else if (cfg.experiment == "boundstate-branch") run_boundstate_branch(cfg, man, dir);
    } catch (const std::exception& e) {
        man.failure = std::string(e.what());
    }
    man.wall_clock_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::ofstream out(dir / "manifest.json");
    out << man.to_json();
    return man;
}

} // namespace nlslab
