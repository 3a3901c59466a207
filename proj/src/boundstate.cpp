#include "nlslab/boundstate.hpp"

#include <cmath>

namespace nlslab {

namespace {

ComplexField cubic(const ComplexField& Q) {
    ComplexField n(Q.grid);
    for (int j = 0; j < Q.size(); ++j) n[j] = std::norm(Q[j]) * Q[j];
    return n;
}

} // namespace

NonlinearBoundState solve_nonlinear_bound_state(complexd z,
                                                const SpectralDecomposition& dec) {
    const double r = std::abs(z);
    if (r > kBoundStateDeltaMax + 1e-14)
        throw regime_error("bound state: |z| above the contractive range");
    const double rho2 = dec.rho_squared();

    NonlinearBoundState out;
    out.z = z;
    out.Q = ComplexField(dec.grid());
    out.q = ComplexField(dec.grid());
    out.E = -rho2;
    if (r == 0.0) return out;

    // gauge reduction: solve on the real branch, rotate afterwards
    const ComplexField& phi = dec.ground_state();
    ComplexField q(dec.grid());
    double E = -rho2;
    double res = 1.0;
    int bad_steps = 0;
    for (int it = 0; it < 200; ++it) {
        ComplexField Q = complexd(r) * phi + q;
        ComplexField N = cubic(Q);
        E = -rho2 - inner_product(phi, N).real() / r;
        q = dec.resolvent_continuous(dec.project_continuous(N), E);
        Q = complexd(r) * phi + q;
        N = cubic(Q);
        double new_res = l2_norm(dec.apply_H(Q) - complexd(E) * Q - N);
        out.residual_history.push_back(new_res);
        if (new_res > res && new_res > 1e-10 && ++bad_steps >= 3)
            throw convergence_error("bound state: residual not contracting");
        res = new_res;
        if (res < 1e-13) break;
    }
    if (res > 1e-12)
        throw convergence_error("bound state: residual stalled above 1e-12");

    complexd phase = z / r;
    out.q = phase * q;
    out.Q = phase * (complexd(r) * phi + q);
    out.E = E;
    out.residual = res;
    return out;
}

BoundStateJacobian bound_state_jacobian(complexd z, const SpectralDecomposition& dec) {
    const double h = std::max(1e-5, 1e-3 * std::abs(z));
    if (std::abs(z) + h > kBoundStateDeltaMax)
        throw regime_error("bound state jacobian: stencil leaves the solvable range");
    auto Qp = solve_nonlinear_bound_state(z + h, dec);
    auto Qm = solve_nonlinear_bound_state(z - h, dec);
    auto Qip = solve_nonlinear_bound_state(z + complexd(0.0, h), dec);
    auto Qim = solve_nonlinear_bound_state(z - complexd(0.0, h), dec);

    BoundStateJacobian J;
    J.z = z;
    J.Q = solve_nonlinear_bound_state(z, dec).Q;
    const complexd s(1.0 / (2.0 * h));
    J.D1Q = s * (Qp.Q - Qm.Q);
    J.D2Q = s * (Qip.Q - Qim.Q);
    J.DE = {(Qp.E - Qm.E) / (2.0 * h), (Qip.E - Qim.E) / (2.0 * h)};
    // differentiate Q[z e^{ia}] = e^{ia} Q[z] in a: DQ.(iz) = iQ
    ComplexField lhs = complexd(-z.imag()) * J.D1Q + complexd(z.real()) * J.D2Q;
    J.gauge_defect = l2_norm(lhs - complexd(0.0, 1.0) * J.Q);
    return J;
}

RefinedProfiles solve_refined_profiles(complexd z_inf, const SpectralDecomposition& dec) {
    if (std::abs(z_inf) > kBoundStateDeltaMax + 1e-14)
        throw regime_error("refined profiles: |z| above the contractive range");
    const double rho2 = dec.rho_squared();
    auto bs = solve_nonlinear_bound_state(z_inf, dec);

    RefinedProfiles out;
    out.z_inf = z_inf;
    out.E_inf = bs.E;
    out.coef_A = ComplexField(dec.grid());
    out.coef_B = ComplexField(dec.grid());
    for (int j = 0; j < dec.size(); ++j) {
        out.coef_A[j] = 2.0 * std::norm(bs.Q[j]);
        out.coef_B[j] = bs.Q[j] * bs.Q[j];
    }
    // shift of the second operator must stay uniformly positive
    const double shift2 = -rho2 - 2.0 * bs.E;
    if (shift2 < rho2 - 1e-6)
        throw spectral_error("refined profiles: -rho^2 - 2E dropped below rho^2");

    const ComplexField& phi = dec.ground_state();
    const ComplexField& A = out.coef_A;
    const ComplexField& B = out.coef_B;
    ComplexField fa(dec.grid()), fb(dec.grid());
    if (std::abs(z_inf) == 0.0) {
        out.profile_a = fa;
        out.profile_b = fb;
        return out;
    }

    auto residuals = [&](const ComplexField& a, const ComplexField& b, complexd c1,
                         complexd c2) {
        ComplexField r1 = complexd(-1.0) * dec.apply_H(a) +
                          dec.project_continuous(A * a + A * phi + B * b) -
                          (complexd(rho2) * a + c1 * a - c2 * b);
        ComplexField r2 = complexd(-1.0) * dec.apply_H(b) +
                          dec.project_continuous(B * a + B * phi + A * b) -
                          (complexd(shift2) * b + c2 * a - c1 * b);
        return std::make_pair(l2_norm(r1), l2_norm(r2));
    };

    double prev_step = 0.0;
    complexd c1(0.0), c2(0.0);
    for (int it = 0; it < 200; ++it) {
        c1 = inner_product(phi, A * phi + A * fa + B * fb);
        c2 = inner_product(phi, B * phi + B * fa + A * fb);
        ComplexField rhs1 = dec.project_continuous(A * fa + A * phi + B * fb) -
                            (c1 * fa - c2 * fb);
        ComplexField rhs2 = dec.project_continuous(B * fa + B * phi + A * fb) -
                            (c2 * fa - c1 * fb);
        ComplexField na = dec.resolvent_continuous(dec.project_continuous(rhs1), -rho2);
        ComplexField nb = dec.resolvent_continuous(dec.project_continuous(rhs2), -shift2);
        double step = l2_norm(na - fa) + l2_norm(nb - fb);
        if (it > 0 && prev_step > 0.0) {
            double ratio = step / prev_step;
            out.contraction = std::max(out.contraction, ratio);
            if (ratio >= 0.5 && step > 1e-13)
                throw regime_error("refined profiles: Picard contraction >= 1/2");
        }
        fa = na;
        fb = nb;
        prev_step = step;
        if (step < 1e-14) break;
    }
    std::tie(out.residual1, out.residual2) = residuals(fa, fb, c1, c2);
    if (out.residual1 > 1e-8 || out.residual2 > 1e-8)
        throw convergence_error("refined profiles: residual above 1e-8");
    out.profile_a = fa;
    out.profile_b = fb;
    return out;
}

} // namespace nlslab
