#include "nlslab/evolution.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>

#include "json.hpp"

namespace nlslab {

namespace {

double quartic_integral(const ComplexField& u) {
    double s = 0.0;
    for (int j = 0; j < u.size(); ++j) {
        double a2 = std::norm(u[j]);
        s += a2 * a2;
    }
    return s * u.grid.spacing;
}

// outer 5% of nodes on each side
double boundary_mass_fraction(const ComplexField& u) {
    int n = u.size();
    int edge = std::max(1, n / 20);
    double outer = 0.0, total = 0.0;
    for (int j = 0; j < n; ++j) {
        double a2 = std::norm(u[j]);
        total += a2;
        if (j < edge || j >= n - edge) outer += a2;
    }
    return total > 0.0 ? outer / total : 0.0;
}

} // namespace

ConservedQuantities conserved_quantities(const ComplexField& u, const Potential& V,
                                         double quartic_prefactor) {
    ConservedQuantities out;
    std::vector<double> v = V.sample(u.grid);
    ComplexField du = spatial_derivative(u, 1);
    double mass = 0.0, energy = 0.0;
    for (int j = 0; j < u.size(); ++j) {
        double a2 = std::norm(u[j]);
        mass += a2;
        energy += std::norm(du[j]) + v[j] * a2 - quartic_prefactor * a2 * a2;
    }
    out.mass = mass * u.grid.spacing;
    out.energy = energy * u.grid.spacing;
    return out;
}

Trajectory evolve(const ComplexField& u0, const EvolutionConfig& cfg,
                  const SpectralDecomposition& dec) {
    const SpatialGrid& grid = dec.grid();
    if (u0.grid != grid) throw std::invalid_argument("evolve: grid mismatch");
    if (!u0.all_finite()) throw std::invalid_argument("evolve: non-finite initial datum");
    double dt = cfg.dt;
    double adt = std::abs(dt);
    if (adt <= 0.0) throw std::invalid_argument("evolve: dt must be nonzero");
    if (adt > 0.5 * grid.spacing + 1e-15)
        throw std::invalid_argument("evolve: |dt| must not exceed dx/2");
    if (cfg.t_end < adt) throw std::invalid_argument("evolve: t_end < |dt|");
    if (cfg.snapshot_stride < 1) throw std::invalid_argument("evolve: bad snapshot stride");

    const ModelEquation* model = std::get_if<ModelEquation>(&cfg.variant);
    double lambda = 1.0;
    if (model) {
        if (model->a1.grid != grid || model->a2.grid != grid || model->b.grid != grid)
            throw std::invalid_argument("evolve: model coefficient grid mismatch");
        if (sup_norm(model->a1) > 0.1 || sup_norm(model->a2) > 0.1)
            throw std::invalid_argument("evolve: model |a| coefficients exceed 0.1");
        if (sup_norm(model->b) > 0.3)
            throw std::invalid_argument("evolve: model |b| coefficient exceeds 0.3");
    } else {
        lambda = std::get<FullNLS>(cfg.variant).lambda;
    }

    int n = grid.n_points;
    int n_modes = cfg.lambda_cut ? dec.modes_below(*cfg.lambda_cut) : n;
    if (n_modes < 1) throw std::invalid_argument("evolve: lambda_cut retains no modes");

    // half-step linear phases e^{i lambda_a dt/2}
    std::vector<complexd> half_phase(n_modes);
    for (int a = 0; a < n_modes; ++a)
        half_phase[a] = std::exp(complexd(0.0, dec.eigenvalue(a) * dt / 2.0));

    Trajectory traj;
    traj.dt = dt;
    traj.t_end = cfg.t_end;
    traj.snapshot_stride = cfg.snapshot_stride;
    traj.variant_name = model ? "model" : "full_nls";
    traj.lambda_cut = cfg.lambda_cut;

    auto record = [&](double t, const ComplexField& u) {
        traj.times.push_back(t);
        traj.snapshots.push_back(u);
        double m = l2_norm(u);
        traj.mass.push_back(m * m);
        traj.energy.push_back(reduced_inner(u, dec.apply_H(u)) -
                              kEnergyQuarticPrefactor * quartic_integral(u));
    };
    record(0.0, u0);

    auto rate = [&](double t) {
        return (model && model->phase_rate) ? model->phase_rate(t) : 0.0;
    };

    long n_steps = std::lround(cfg.t_end / adt);
    std::vector<complexd> c = dec.to_modes(u0, n_modes);
    double theta = 0.0; // Theta(t) = 2 int_0^t phase_rate, by trapezoid

    for (long i = 1; i <= n_steps; ++i) {
        double t0 = (double)(i - 1) * dt;
        double t1 = (double)i * dt;

        for (int a = 0; a < n_modes; ++a) c[a] *= half_phase[a];
        ComplexField u = dec.from_modes(c);

        if (!model) {
            // exact pointwise phase: |u| is constant along i u_t = lambda|u|^2 u
            for (int j = 0; j < n; ++j)
                u[j] *= std::exp(complexd(0.0, -lambda * std::norm(u[j]) * dt));
        } else {
            // inner Strang: exact cubic half-phases around RK4 on the
            // coefficient terms, so a1 = a2 = b = 0 degenerates exactly to
            // the full_nls substep
            double e0 = rate(t0);
            double th_h = theta + (dt / 2.0) * (e0 + rate(t0 + dt / 2.0));
            double th_1 = theta + dt * (e0 + rate(t1));
            for (int j = 0; j < n; ++j)
                u[j] *= std::exp(complexd(0.0, -std::norm(u[j]) * dt / 2.0));
            complexd eth0 = std::exp(complexd(0.0, theta));
            complexd ethh = std::exp(complexd(0.0, th_h));
            complexd eth1 = std::exp(complexd(0.0, th_1));
            const complexd I(0.0, 1.0);
            auto rhs = [&](complexd eth, complexd w, int j) {
                return -I * (model->a1[j] * w + model->a2[j] * eth * std::conj(w) +
                             model->b[j] * w * w);
            };
            for (int j = 0; j < n; ++j) {
                complexd w = u[j];
                complexd k1 = rhs(eth0, w, j);
                complexd k2 = rhs(ethh, w + 0.5 * dt * k1, j);
                complexd k3 = rhs(ethh, w + 0.5 * dt * k2, j);
                complexd k4 = rhs(eth1, w + dt * k3, j);
                u[j] = w + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            }
            for (int j = 0; j < n; ++j)
                u[j] *= std::exp(complexd(0.0, -std::norm(u[j]) * dt / 2.0));
            theta = th_1;
        }

        if (!u.all_finite())
            throw blow_up_error("evolve: non-finite field in time step", t0);
        if (boundary_mass_fraction(u) > cfg.boundary_tolerance)
            throw boundary_pollution_error("evolve: boundary mass fraction above tolerance", t1);

        c = dec.to_modes(u, n_modes);
        for (int a = 0; a < n_modes; ++a) c[a] *= half_phase[a];

        if (i % cfg.snapshot_stride == 0 || i == n_steps)
            record(t1, dec.from_modes(c));
    }
    return traj;
}

void Trajectory::write_binary(const std::string& path) const {
    nlohmann::json hdr;
    hdr["half_width"] = snapshots.empty() ? 0.0 : snapshots[0].grid.half_width;
    hdr["n_points"] = snapshots.empty() ? 0 : snapshots[0].grid.n_points;
    hdr["dt"] = dt;
    hdr["t_end"] = t_end;
    hdr["snapshot_stride"] = snapshot_stride;
    hdr["variant"] = variant_name;
    if (lambda_cut) hdr["lambda_cut"] = *lambda_cut;
    hdr["n_snapshots"] = times.size();
    hdr["times"] = times;
    std::string h = hdr.dump();

    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    f.write("NLSLTRJ1", 8);
    std::uint64_t len = h.size();
    f.write(reinterpret_cast<const char*>(&len), sizeof(len));
    f.write(h.data(), (std::streamsize)len);
    for (const ComplexField& u : snapshots) {
        for (int j = 0; j < u.size(); ++j) {
            float re = (float)u[j].real(), im = (float)u[j].imag();
            f.write(reinterpret_cast<const char*>(&re), sizeof(re));
            f.write(reinterpret_cast<const char*>(&im), sizeof(im));
        }
    }
}

void Trajectory::write_conserved_csv(const std::string& path) const {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    f << "t,mass,energy\n";
    char buf[128];
    for (size_t i = 0; i < times.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", times[i], mass[i], energy[i]);
        f << buf;
    }
}

} // namespace nlslab
