#include "nlslab/modulation.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace nlslab {

namespace {

const complexd kI(0.0, 1.0);

// solve the 2x2 real system M s = r
std::array<double, 2> solve2(const std::array<std::array<double, 2>, 2>& M,
                             const std::array<double, 2>& r, double det_tol) {
    double det = M[0][0] * M[1][1] - M[0][1] * M[1][0];
    if (std::abs(det) < det_tol)
        throw regime_error("modulation: near-singular 2x2 system");
    return {(r[0] * M[1][1] - r[1] * M[0][1]) / det,
            (M[0][0] * r[1] - M[1][0] * r[0]) / det};
}

double h1_norm(const ComplexField& u) {
    double a = l2_norm(u), b = l2_norm(spatial_derivative(u, 1));
    return std::sqrt(a * a + b * b);
}

// Newton iteration for K_j(z) = <i(u - Q[z]), D_j Q[z]> = 0 from a given
// start; the Jacobian drops the second-derivative term (O(eta) small).
complexd newton_root(const ComplexField& u, const SpectralDecomposition& dec,
                     complexd z0, std::array<double, 2>& residual_out) {
    complexd z = z0;
    for (int it = 0; it < 30; ++it) {
        BoundStateJacobian jac = bound_state_jacobian(z, dec);
        ComplexField ieta = kI * (u - jac.Q);
        std::array<double, 2> K = {reduced_inner(ieta, jac.D1Q),
                                   reduced_inner(ieta, jac.D2Q)};
        residual_out = {std::abs(K[0]), std::abs(K[1])};
        if (residual_out[0] + residual_out[1] < 1e-9) return z;
        std::array<std::array<double, 2>, 2> M;
        M[0][0] = reduced_inner(kI * jac.D1Q, jac.D1Q);
        M[0][1] = reduced_inner(kI * jac.D2Q, jac.D1Q);
        M[1][0] = reduced_inner(kI * jac.D1Q, jac.D2Q);
        M[1][1] = reduced_inner(kI * jac.D2Q, jac.D2Q);
        std::array<double, 2> step = solve2(M, K, 1e-12);
        z += complexd(step[0], step[1]);
        if (std::abs(z) > kBoundStateDeltaMax)
            throw regime_error("decompose: Newton left the small-soliton ball");
    }
    throw convergence_error("decompose: orthogonality Newton did not converge");
}

} // namespace

ModulationState decompose(const ComplexField& u, const SpectralDecomposition& dec,
                          std::optional<complexd> hint) {
    if (u.grid != dec.grid()) throw std::invalid_argument("decompose: grid mismatch");
    if (h1_norm(u) > 0.2)
        throw regime_error("decompose: H1 norm above the smallness threshold");

    complexd guess = hint ? *hint : inner_product(dec.ground_state(), u);
    std::array<double, 2> res{};
    complexd z = newton_root(u, dec, guess, res);
    if (!hint) {
        // uniqueness inside the ball: a displaced start must find the same root
        std::array<double, 2> res2{};
        complexd z2 = newton_root(u, dec, 1.2 * guess, res2);
        if (std::abs(z2 - z) > 1e-8)
            throw convergence_error("decompose: distinct roots from displaced starts");
    }

    NonlinearBoundState bs = solve_nonlinear_bound_state(z, dec);
    ModulationState st;
    st.z = z;
    st.E = bs.E;
    st.eta = u - bs.Q;
    st.ortho_residual = res;
    return st;
}

ModulationPath track_modulation(const Trajectory& traj, const SpectralDecomposition& dec) {
    size_t n = traj.times.size();
    if (n < 3) throw std::invalid_argument("track_modulation: need at least 3 snapshots");

    ModulationPath path;
    path.states.reserve(n);
    std::optional<complexd> hint;
    for (size_t i = 0; i < n; ++i) {
        ModulationState st = decompose(traj.snapshots[i], dec, hint);
        st.t = traj.times[i];
        if (i > 0) {
            const ModulationState& p = path.states.back();
            st.theta = p.theta + 0.5 * (st.t - p.t) * (st.E + p.E);
        }
        hint = st.z;
        path.states.push_back(std::move(st));
    }

    path.zdot.resize(n);
    path.defect.resize(n);
    path.defect_rhs.resize(n);
    path.limit_series.resize(n);
    auto zat = [&](size_t i) { return path.states[i].z; };
    for (size_t i = 0; i < n; ++i) {
        if (i == 0)
            path.zdot[i] = (zat(1) - zat(0)) / (path.states[1].t - path.states[0].t);
        else if (i == n - 1)
            path.zdot[i] = (zat(i) - zat(i - 1)) / (path.states[i].t - path.states[i - 1].t);
        else
            path.zdot[i] = (zat(i + 1) - zat(i - 1)) /
                           (path.states[i + 1].t - path.states[i - 1].t);
        const ModulationState& st = path.states[i];
        path.defect[i] = std::abs(path.zdot[i] - kI * st.E * st.z);
        BoundStateJacobian jac = bound_state_jacobian(st.z, dec);
        ComplexField w = conj(jac.Q) * st.eta * st.eta +
                         2.0 * (jac.Q * st.eta * conj(st.eta)) +
                         st.eta * conj(st.eta) * st.eta;
        double r1 = reduced_inner(kI * w, jac.D1Q), r2 = reduced_inner(kI * w, jac.D2Q);
        path.defect_rhs[i] = std::sqrt(r1 * r1 + r2 * r2);
        path.limit_series[i] = st.z * std::exp(complexd(0.0, -st.theta));
    }
    return path;
}

ProjectionComparison projection_comparison(complexd z, const ComplexField& eta,
                                           const SpectralDecomposition& dec) {
    if (std::abs(z) > kBoundStateDeltaMax)
        throw regime_error("projection_comparison: |z| above delta_max");
    BoundStateJacobian jac = bound_state_jacobian(z, dec);
    const ComplexField& phi = dec.ground_state();
    ComplexField iphi = kI * phi;

    std::array<std::array<double, 2>, 2> M;
    M[0][0] = reduced_inner(kI * phi, jac.D1Q);
    M[0][1] = reduced_inner(kI * iphi, jac.D1Q);
    M[1][0] = reduced_inner(kI * phi, jac.D2Q);
    M[1][1] = reduced_inner(kI * iphi, jac.D2Q);
    std::array<double, 2> r = {-reduced_inner(kI * eta, jac.D1Q),
                               -reduced_inner(kI * eta, jac.D2Q)};
    std::array<double, 2> c = solve2(M, r, 1e-8);

    ProjectionComparison out;
    out.mapped = eta + complexd(c[0], c[1]) * phi;
    out.defect = l2_norm(dec.project_continuous(out.mapped) - dec.project_continuous(eta));
    return out;
}

void ModulationPath::write_csv(const std::string& path) const {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    f << "t,re_z,im_z,E,theta,defect,defect_rhs,re_limit,im_limit\n";
    char buf[256];
    for (size_t i = 0; i < states.size(); ++i) {
        std::snprintf(buf, sizeof(buf),
                      "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                      states[i].t, states[i].z.real(), states[i].z.imag(), states[i].E,
                      states[i].theta, defect[i], defect_rhs[i], limit_series[i].real(),
                      limit_series[i].imag());
        f << buf;
    }
}

} // namespace nlslab
