#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "nlslab/boundstate.hpp"
#include "nlslab/evolution.hpp"

using namespace nlslab;

namespace {

const Potential& well() {
    static Potential V = Potential::gaussian_well(1.0, 1.0);
    return V;
}

const SpectralDecomposition& dec() {
    static SpectralDecomposition d(well(), SpatialGrid(40.0, 768));
    return d;
}

ComplexField wavepacket(double amp, double x0, double k0, double width) {
    return ComplexField(dec().grid(), [=](double x) {
        double s = (x - x0) / width;
        return amp * std::exp(-s * s) * std::exp(complexd(0.0, k0 * x));
    });
}

double rel_l2_error(const ComplexField& a, const ComplexField& b) {
    return l2_norm(a - b) / l2_norm(b);
}

// stepper-consistent energy: quadratic part with the dense H
double energy_with(const ComplexField& u, double c4) {
    double quart = 0.0;
    for (int j = 0; j < u.size(); ++j) quart += std::norm(u[j]) * std::norm(u[j]);
    quart *= u.grid.spacing;
    return reduced_inner(u, dec().apply_H(u)) - c4 * quart;
}

EvolutionConfig nls_cfg(double dt, double t_end, int stride = 1) {
    EvolutionConfig cfg;
    cfg.variant = FullNLS{1.0};
    cfg.dt = dt;
    cfg.t_end = t_end;
    cfg.snapshot_stride = stride;
    return cfg;
}

} // namespace

TEST_CASE("config validation") {
    ComplexField u0 = wavepacket(0.05, -10.0, 0.5, 3.0);
    double dx = dec().grid().spacing;
    CHECK_THROWS_AS(evolve(u0, nls_cfg(0.6 * dx, 1.0), dec()), std::invalid_argument);
    CHECK_THROWS_AS(evolve(u0, nls_cfg(0.0, 1.0), dec()), std::invalid_argument);
    CHECK_THROWS_AS(evolve(u0, nls_cfg(0.01, 0.001), dec()), std::invalid_argument);
    EvolutionConfig bad = nls_cfg(0.01, 1.0);
    bad.snapshot_stride = 0;
    CHECK_THROWS_AS(evolve(u0, bad, dec()), std::invalid_argument);

    ModelEquation m;
    m.a1 = ComplexField(dec().grid(), [](double x) { return 0.2 * std::exp(-x * x); });
    m.a2 = ComplexField(dec().grid());
    m.b = ComplexField(dec().grid());
    EvolutionConfig mc = nls_cfg(0.01, 1.0);
    mc.variant = m;
    CHECK_THROWS_AS(evolve(u0, mc, dec()), std::invalid_argument);
}

TEST_CASE("trajectory bookkeeping") {
    ComplexField u0 = wavepacket(0.01, -10.0, 0.3, 3.0);
    Trajectory traj = evolve(u0, nls_cfg(0.02, 1.0, 10), dec());
    REQUIRE(traj.times.size() == traj.snapshots.size());
    CHECK(traj.times[0] == 0.0);
    // first snapshot is the initial datum verbatim
    CHECK(l2_norm(traj.snapshots[0] - u0) == 0.0);
    for (size_t i = 1; i < traj.times.size(); ++i) CHECK(traj.times[i] > traj.times[i - 1]);
    CHECK(traj.times.back() == doctest::Approx(1.0));
    CHECK(traj.times.size() == 6); // t=0, then every 10th of 50 steps
}

TEST_CASE("linear limit matches the spectral propagator") {
    // positive k moves left under e^{iHt}; aim the carrier at the far edge
    ComplexField u0 = wavepacket(1e-6, -10.0, -0.3, 4.0);
    Trajectory traj = evolve(u0, nls_cfg(0.02, 10.0, 500), dec());
    ComplexField ref = dec().propagate(u0, 10.0);
    CHECK(rel_l2_error(traj.snapshots.back(), ref) < 1e-6);
}

TEST_CASE("exact solitary wave propagates with its eigenphase") {
    NonlinearBoundState bs = solve_nonlinear_bound_state(0.1, dec());
    Trajectory traj = evolve(bs.Q, nls_cfg(0.005, 20.0, 4000), dec());
    complexd ph = std::exp(complexd(0.0, bs.E * 20.0));
    double err = l2_norm(traj.snapshots.back() - ph * bs.Q) / l2_norm(bs.Q);
    CHECK(err < 1e-6);
}

TEST_CASE("second-order self-convergence") {
    ComplexField u0 = wavepacket(0.1, -10.0, 0.5, 3.0);
    ComplexField ref = evolve(u0, nls_cfg(0.005, 2.0, 1000), dec()).snapshots.back();
    double e1 = l2_norm(evolve(u0, nls_cfg(0.04, 2.0, 1000), dec()).snapshots.back() - ref);
    double e2 = l2_norm(evolve(u0, nls_cfg(0.02, 2.0, 1000), dec()).snapshots.back() - ref);
    CHECK(e1 / e2 > 3.0);
    CHECK(e1 / e2 < 5.5);
}

TEST_CASE("mass is conserved to roundoff") {
    // the soliton stays confined, so the run can be long
    ComplexField u0 = solve_nonlinear_bound_state(0.12, dec()).Q;
    Trajectory traj = evolve(u0, nls_cfg(0.02, 20.0, 100), dec());
    for (double m : traj.mass)
        CHECK(std::abs(m - traj.mass[0]) / traj.mass[0] < 1e-9 * 20.0);
    // short enough that the packet's fast tail stays inside the box
    ComplexField v0 = wavepacket(0.1, -10.0, 0.5, 3.0);
    Trajectory tw = evolve(v0, nls_cfg(0.02, 4.0, 50), dec());
    for (double m : tw.mass)
        CHECK(std::abs(m - tw.mass[0]) / tw.mass[0] < 1e-9 * 4.0);
}

TEST_CASE("conservation-selection oracle picks the quartic prefactor") {
    ComplexField u0 = wavepacket(0.2, -10.0, 0.5, 3.0);
    auto drift = [&](double dt, double c4) {
        Trajectory traj = evolve(u0, nls_cfg(dt, 4.0, 25), dec());
        double e0 = energy_with(traj.snapshots[0], c4), worst = 0.0;
        for (const ComplexField& u : traj.snapshots)
            worst = std::max(worst, std::abs(energy_with(u, c4) - e0));
        return worst;
    };
    double good = drift(0.04, 0.5) / drift(0.02, 0.5);
    double bad = drift(0.04, 0.25) / drift(0.02, 0.25);
    CHECK(good > 2.5);
    CHECK(good < 5.5);
    CHECK(bad < 1.5); // wrong prefactor: drift does not shrink with dt
}

TEST_CASE("standalone conserved quantities") {
    ComplexField zero(dec().grid());
    ConservedQuantities cq = conserved_quantities(zero, well());
    CHECK(cq.mass == 0.0);
    CHECK(cq.energy == 0.0);
    ComplexField u = wavepacket(0.1, -10.0, 0.5, 3.0);
    ConservedQuantities c1 = conserved_quantities(u, well());
    CHECK(c1.mass == doctest::Approx(l2_norm(u) * l2_norm(u)).epsilon(1e-12));
    CHECK(c1.energy == doctest::Approx(energy_with(u, 0.5)).epsilon(1e-6));
}

TEST_CASE("time reversal inverts the flow") {
    ComplexField u0 = wavepacket(0.1, -10.0, 0.5, 3.0);
    ComplexField fwd = evolve(u0, nls_cfg(0.02, 2.0, 1000), dec()).snapshots.back();
    Trajectory back = evolve(fwd, nls_cfg(-0.02, 2.0, 1000), dec());
    CHECK(rel_l2_error(back.snapshots.back(), u0) < 1e-10);
}

TEST_CASE("gauge equivariance") {
    ComplexField u0 = wavepacket(0.1, -10.0, 0.5, 3.0);
    complexd ph = std::exp(complexd(0.0, 1.1));
    ComplexField a = evolve(ph * u0, nls_cfg(0.02, 1.0, 1000), dec()).snapshots.back();
    ComplexField b = evolve(u0, nls_cfg(0.02, 1.0, 1000), dec()).snapshots.back();
    CHECK(l2_norm(a - ph * b) < 1e-12);
}

TEST_CASE("model with zero coefficients equals full_nls") {
    ComplexField u0 = wavepacket(0.1, -10.0, 0.5, 3.0);
    ModelEquation m;
    m.a1 = ComplexField(dec().grid());
    m.a2 = ComplexField(dec().grid());
    m.b = ComplexField(dec().grid());
    m.phase_rate = [](double) { return -0.7; };
    EvolutionConfig mc = nls_cfg(0.02, 2.0, 100);
    mc.variant = m;
    ComplexField a = evolve(u0, mc, dec()).snapshots.back();
    ComplexField b = evolve(u0, nls_cfg(0.02, 2.0, 100), dec()).snapshots.back();
    CHECK(l2_norm(a - b) < 1e-12);
}

TEST_CASE("model variant is second order") {
    ComplexField u0 = wavepacket(0.1, -10.0, 0.5, 3.0);
    ModelEquation m;
    m.a1 = ComplexField(dec().grid(), [](double x) { return 0.01 * std::exp(-x * x); });
    m.a2 = ComplexField(dec().grid(), [](double x) { return complexd(0.0, 0.01) * std::exp(-x * x); });
    m.b = ComplexField(dec().grid(), [](double x) { return 0.05 * std::exp(-x * x); });
    m.phase_rate = [](double t) { return -0.5 - 0.01 * t; };
    auto cfg = [&](double dt) {
        EvolutionConfig c = nls_cfg(dt, 2.0, 1000);
        c.variant = m;
        return c;
    };
    ComplexField ref = evolve(u0, cfg(0.005), dec()).snapshots.back();
    double e1 = l2_norm(evolve(u0, cfg(0.04), dec()).snapshots.back() - ref);
    double e2 = l2_norm(evolve(u0, cfg(0.02), dec()).snapshots.back() - ref);
    CHECK(e1 / e2 > 3.0);
    CHECK(e1 / e2 < 5.5);
}

TEST_CASE("truncated linear flow stays accurate for band-limited data") {
    ComplexField u0 = wavepacket(0.05, -10.0, 0.5, 3.0);
    EvolutionConfig cut = nls_cfg(0.02, 2.0, 100);
    cut.lambda_cut = 100.0;
    ComplexField a = evolve(u0, cut, dec()).snapshots.back();
    ComplexField b = evolve(u0, nls_cfg(0.02, 2.0, 100), dec()).snapshots.back();
    CHECK(rel_l2_error(a, b) < 1e-8);
}

TEST_CASE("stability guards") {
    ComplexField hot = wavepacket(1e200, 0.0, 0.0, 3.0);
    CHECK_THROWS_AS(evolve(hot, nls_cfg(0.02, 1.0), dec()), blow_up_error);
    ComplexField edge = wavepacket(0.05, 37.0, 0.0, 1.0);
    CHECK_THROWS_AS(evolve(edge, nls_cfg(0.02, 1.0), dec()), boundary_pollution_error);
}

TEST_CASE("trajectory export round-trips its header") {
    ComplexField u0 = wavepacket(0.05, -10.0, 0.5, 3.0);
    Trajectory traj = evolve(u0, nls_cfg(0.02, 1.0, 25), dec());
    std::string bin = "traj_test.bin", csv = "traj_test.csv";
    traj.write_binary(bin);
    traj.write_conserved_csv(csv);

    std::ifstream f(bin, std::ios::binary);
    char magic[8];
    f.read(magic, 8);
    CHECK(std::string(magic, 8) == "NLSLTRJ1");
    std::uint64_t len = 0;
    f.read(reinterpret_cast<char*>(&len), sizeof(len));
    std::string hdr(len, '\0');
    f.read(hdr.data(), (std::streamsize)len);
    CHECK(hdr.find("\"n_points\":768") != std::string::npos);
    f.seekg(0, std::ios::end);
    auto total = (std::uint64_t)f.tellg();
    CHECK(total == 16 + len + traj.snapshots.size() * 768 * 8);

    std::ifstream g(csv);
    std::string line;
    size_t rows = 0;
    while (std::getline(g, line)) ++rows;
    CHECK(rows == traj.times.size() + 1);
    std::remove(bin.c_str());
    std::remove(csv.c_str());
}
