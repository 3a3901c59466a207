#include "nlslab/jost.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace nlslab {

namespace {

constexpr double kBlowup = 1e6;

// Gregory end corrections of order 4 relative to the plain node sum:
// end weights {3/8, 7/6, 23/24, 1, 1, ...}.
constexpr double gw0 = 3.0 / 8.0 - 1.0;
constexpr double gw1 = 7.0 / 6.0 - 1.0;
constexpr double gw2 = 23.0 / 24.0 - 1.0;

inline double far_weight(int dist_from_far_end) {
    switch (dist_from_far_end) {
        case 0: return 3.0 / 8.0;
        case 1: return 7.0 / 6.0;
        case 2: return 23.0 / 24.0;
        default: return 1.0;
    }
}

} // namespace

FineSampling make_fine_sampling(const Potential& V, const SpatialGrid& grid,
                                double k_max) {
    if (!V.decayed_on(grid))
        throw std::invalid_argument(
            "jost: potential not decayed on the outer 10% of the grid");
    FineSampling fv;
    fv.target = grid;
    // marching error scales like (2kh)^4; keep 2*k_max*h below ~0.06
    double h_target = 0.03 / std::max(1.0, k_max);
    fv.stride = std::max(1, (int)std::ceil(grid.spacing / h_target));
    fv.h = grid.spacing / fv.stride;
    fv.n_fine = grid.n_points * fv.stride;
    fv.V.resize(fv.n_fine);
    for (int l = 0; l < fv.n_fine; ++l) fv.V[l] = V(fv.y(l));
    return fv;
}

// m+(x) = 1 + \int_x^{inf} D_k(y-x) V m+ dy with D_k(s) = (e^{2iks}-1)/2ik.
// The kernel splits into e^{2ik(y-x)} and 1, so a single inward pass keeps
// two running sums; both are phase-normalized to the current node so every
// stored factor is e^{2ik*(nonnegative)} and stays bounded for Im k >= 0.
JostColumn jost_column(const FineSampling& fv, complexd k) {
    const int N = fv.n_fine;
    const double h = fv.h;
    const complexd two_ik = complexd(0.0, 2.0) * k;
    const bool k_zero = (k == complexd(0.0, 0.0));
    const complexd eh = std::exp(two_ik * h);   // |eh| <= 1 for Im k >= 0
    const complexd e2h = eh * eh;
    const complexd D1 = k_zero ? complexd(h) : (eh - 1.0) / two_ik;
    const complexd D2 = k_zero ? complexd(2.0 * h) : (e2h - 1.0) / two_ik;

    JostColumn col;
    const int n_out = fv.target.n_points;
    col.m_plus.assign(n_out, complexd(1.0));
    col.m_minus.assign(n_out, complexd(1.0));
    col.dm_plus.assign(n_out, complexd(0.0));
    col.dm_minus.assign(n_out, complexd(0.0));

    std::vector<complexd> m(N), mq(N); // mq = V*m

    // ---- m+ : inward march from +L ------------------------------------
    {
        complexd PH(0.0); // sum of w e^{2ik(y_l - y_j)} V m, l > j
        complexd Q(0.0);  // sum of w V m
        complexd D(0.0);  // sum of w (y_l - y_j) V m (k = 0 kernel)
        m[N - 1] = 1.0;
        mq[N - 1] = fv.V[N - 1];
        PH = far_weight(0) * mq[N - 1];
        Q = far_weight(0) * mq[N - 1];
        for (int j = N - 2; j >= 0; --j) {
            PH *= eh;
            D += h * Q;
            complexd acc = k_zero ? D : (PH - Q) / two_ik;
            if (j + 2 <= N - 1)
                acc += gw1 * D1 * mq[j + 1] + gw2 * D2 * mq[j + 2];
            m[j] = 1.0 + h * acc;
            if (std::abs(m[j]) > kBlowup)
                throw instability_error("jost: m+ marching diverged");
            mq[j] = fv.V[j] * m[j];
            if (j % fv.stride == 0) {
                // m+' = -\int_x^{inf} e^{2ik(y-x)} V m dy
                complexd dsum = PH + (1.0 + gw0) * mq[j];
                if (j + 2 <= N - 1)
                    dsum += gw1 * eh * mq[j + 1] + gw2 * e2h * mq[j + 2];
                int jo = j / fv.stride;
                col.m_plus[jo] = m[j];
                col.dm_plus[jo] = -h * dsum;
            }
            double w = far_weight(N - 1 - j);
            PH += w * mq[j];
            Q += w * mq[j];
        }
        // node N-1 on the target grid
        col.m_plus[n_out - 1] = m[(n_out - 1) * fv.stride];
        if (std::abs(k) == 0.0 || k.imag() == 0.0) {
            // scattering integrals (real k only; integrands decay with V)
            complexd iT(0.0), iR(0.0);
            complexd phase(1.0, 0.0);
            for (int l = 0; l < N; ++l) {
                if ((l & 1023) == 0) phase = std::exp(two_ik * fv.y(l));
                iT += mq[l];
                iR += phase * mq[l]; // e^{+2iky} V m+
                phase *= eh;
            }
            col.int_V_m_plus = h * iT;
            col.int_R_minus = h * iR;
        }
    }

    // ---- m- : inward march from -L ------------------------------------
    // m-(x) = 1 + \int_{-inf}^x D_k(x-y) V m- dy
    {
        complexd PH(0.0), Q(0.0), D(0.0);
        m[0] = 1.0;
        mq[0] = fv.V[0];
        PH = far_weight(0) * mq[0];
        Q = far_weight(0) * mq[0];
        for (int j = 1; j < N; ++j) {
            PH *= eh;
            D += h * Q;
            complexd acc = k_zero ? D : (PH - Q) / two_ik;
            if (j - 2 >= 0)
                acc += gw1 * D1 * mq[j - 1] + gw2 * D2 * mq[j - 2];
            m[j] = 1.0 + h * acc;
            if (std::abs(m[j]) > kBlowup)
                throw instability_error("jost: m- marching diverged");
            mq[j] = fv.V[j] * m[j];
            if (j % fv.stride == 0) {
                // m-' = +\int_{-inf}^x e^{2ik(x-y)} V m dy
                complexd dsum = PH + (1.0 + gw0) * mq[j];
                if (j - 2 >= 0)
                    dsum += gw1 * eh * mq[j - 1] + gw2 * e2h * mq[j - 2];
                int jo = j / fv.stride;
                col.m_minus[jo] = m[j];
                col.dm_minus[jo] = h * dsum;
            }
            double w = far_weight(j);
            PH += w * mq[j];
            Q += w * mq[j];
        }
        if (std::abs(k) == 0.0 || k.imag() == 0.0) {
            complexd iT(0.0), iR(0.0);
            complexd phase(1.0, 0.0);
            const complexd ehc = std::exp(-two_ik * h);
            for (int l = 0; l < N; ++l) {
                if ((l & 1023) == 0) phase = std::exp(-two_ik * fv.y(l));
                iT += mq[l];
                iR += phase * mq[l]; // e^{-2iky} V m-
                phase *= ehc;
            }
            col.int_V_m_minus = h * iT;
            col.int_R_plus = h * iR;
        }
    }
    return col;
}

namespace {

JostSolution solve_jost_impl(const Potential& V, const SpatialGrid& grid,
                             const FrequencyGrid& kgrid, bool parallel) {
    FineSampling fv = make_fine_sampling(V, grid, kgrid.band_limit);
    JostSolution sol;
    sol.grid = grid;
    sol.kgrid = kgrid;
    sol.columns.resize(kgrid.m_points);
    if (parallel) {
        std::exception_ptr err;
#pragma omp parallel for schedule(static)
        for (int i = 0; i < kgrid.m_points; ++i) {
            try {
                sol.columns[i] = jost_column(fv, complexd(kgrid.k(i), 0.0));
            } catch (...) {
#pragma omp critical
                if (!err) err = std::current_exception();
            }
        }
        if (err) std::rethrow_exception(err);
    } else {
        for (int i = 0; i < kgrid.m_points; ++i)
            sol.columns[i] = jost_column(fv, complexd(kgrid.k(i), 0.0));
    }
    return sol;
}

} // namespace

JostSolution solve_jost(const Potential& V, const SpatialGrid& grid,
                        const FrequencyGrid& kgrid) {
    return solve_jost_impl(V, grid, kgrid, true);
}

JostSolution solve_jost_serial(const Potential& V, const SpatialGrid& grid,
                               const FrequencyGrid& kgrid) {
    return solve_jost_impl(V, grid, kgrid, false);
}

ScatteringData compute_scattering(const JostSolution& jost, const Potential& V,
                                  const SpatialGrid& grid) {
    (void)V;
    (void)grid;
    const auto& kg = jost.kgrid;
    ScatteringData sd;
    sd.kgrid = kg;
    sd.T.resize(kg.m_points);
    sd.R_plus.resize(kg.m_points);
    sd.R_minus.resize(kg.m_points);
    for (int i = 0; i < kg.m_points; ++i) {
        const complexd two_ik = complexd(0.0, 2.0 * kg.k(i));
        const auto& c = jost.at(i);
        complexd invT_p = 1.0 - c.int_V_m_plus / two_ik;
        complexd invT_m = 1.0 - c.int_V_m_minus / two_ik;
        if (std::abs(invT_p - invT_m) > 1e-4 * std::max(1.0, std::abs(invT_p)))
            throw inconsistency_error("compute_scattering: defT disagreement between sides");
        complexd invT = 0.5 * (invT_p + invT_m);
        sd.T[i] = 1.0 / invT;
        sd.R_plus[i] = sd.T[i] * c.int_R_plus / two_ik;
        sd.R_minus[i] = sd.T[i] * c.int_R_minus / two_ik;
        double u = std::abs(std::norm(sd.T[i]) + std::norm(sd.R_plus[i]) - 1.0);
        u = std::max(u, std::abs(std::norm(sd.T[i]) + std::norm(sd.R_minus[i]) - 1.0));
        sd.unitarity_defect = std::max(sd.unitarity_defect, u);
        sd.cross_defect = std::max(
            sd.cross_defect, std::abs(sd.T[i] * std::conj(sd.R_minus[i]) +
                                      std::conj(sd.T[i]) * sd.R_plus[i]));
    }
    if (sd.unitarity_defect > 1e-3)
        throw inconsistency_error(
            "compute_scattering: unitarity defect above 1e-3 (under-resolved Jost solve)");
    // small-k slope of T over the 5 smallest positive-k nodes; fit
    // T = alpha k + beta k^2 so the window's curvature does not bias alpha
    {
        double S2 = 0.0, S3 = 0.0, S4 = 0.0;
        complexd b1(0.0), b2(0.0);
        int half = kg.m_points / 2;
        for (int i = half; i < std::min(half + 5, kg.m_points); ++i) {
            double k = kg.k(i);
            S2 += k * k;
            S3 += k * k * k;
            S4 += k * k * k * k;
            b1 += sd.T[i] * k;
            b2 += sd.T[i] * k * k;
        }
        sd.alpha_slope = (S4 * b1 - S3 * b2) / (S2 * S4 - S3 * S3);
    }
    return sd;
}

GenericityResult check_generic(const Potential& V, const SpatialGrid& grid) {
    FineSampling fv = make_fine_sampling(V, grid, 1.0);
    JostColumn c0 = jost_column(fv, complexd(0.0, 0.0));
    complexd vp = c0.int_V_m_plus;
    complexd vm = c0.int_V_m_minus;
    if (std::abs(vp - vm) > 1e-6)
        throw inconsistency_error("check_generic: +/- integrals disagree");
    GenericityResult r;
    r.value = 0.5 * (vp + vm);
    r.is_generic = std::abs(r.value) > 1e-6;
    return r;
}

double jost_ode_residual(const JostSolution& jost, const Potential& V, int column,
                         bool plus_side) {
    const auto& g = jost.grid;
    const auto& c = jost.at(column);
    const complexd k(jost.kgrid.k(column), 0.0);
    const complexd two_ik = complexd(0.0, 2.0) * (plus_side ? k : -k);
    ComplexField m(g);
    m.values = plus_side ? c.m_plus : c.m_minus;
    ComplexField d1 = spatial_derivative(m, 1);
    ComplexField d2 = spatial_derivative(m, 2);
    double sup = 0.0;
    const int lo = g.n_points / 10, hi = g.n_points - g.n_points / 10;
    for (int j = lo; j < hi; ++j) {
        complexd r = d2[j] + two_ik * d1[j] - V(g.x(j)) * m[j];
        sup = std::max(sup, std::abs(r));
    }
    return sup;
}

} // namespace nlslab
