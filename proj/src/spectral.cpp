#include "nlslab/spectral.hpp"

#include <lapacke.h>
#include <cblas.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nlslab {

namespace {

// 6th-order stencil for -d^2/dx^2, Dirichlet truncation at the ends
constexpr double s0 = 49.0 / 18.0;
constexpr double s1 = -3.0 / 2.0;
constexpr double s2 = 3.0 / 20.0;
constexpr double s3 = -1.0 / 90.0;

constexpr double two_pi = 6.283185307179586476925286766559;

constexpr double gw0 = 3.0 / 8.0 - 1.0;
constexpr double gw1 = 7.0 / 6.0 - 1.0;
constexpr double gw2 = 23.0 / 24.0 - 1.0;

} // namespace

SpectralDecomposition::SpectralDecomposition(const Potential& V,
                                             const SpatialGrid& grid)
    : grid_(grid) {
    const int n = grid.n_points;
    const double ih2 = 1.0 / (grid.spacing * grid.spacing);
    vdiag_.resize(n);
    for (int j = 0; j < n; ++j) vdiag_[j] = V(grid.x(j));

    evecs_.assign((size_t)n * n, 0.0);
    auto at = [&](int r, int c) -> double& { return evecs_[(size_t)c * n + r]; };
    const double coef[4] = {s0 * ih2, s1 * ih2, s2 * ih2, s3 * ih2};
    for (int j = 0; j < n; ++j) {
        at(j, j) = coef[0] + vdiag_[j];
        for (int d = 1; d <= 3; ++d)
            if (j + d < n) {
                at(j + d, j) = coef[d];
                at(j, j + d) = coef[d];
            }
    }
    evals_.resize(n);
    int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, evecs_.data(), n,
                              evals_.data());
    if (info != 0)
        throw spectral_error("dsyevd failed, info=" + std::to_string(info));

    n_bound_ = 0;
    while (n_bound_ < n && evals_[n_bound_] < 0.0) ++n_bound_;

    if (n_bound_ >= 1) {
        phi_ = ComplexField(grid);
        const double* v = &evecs_[0];
        int jmax = 0;
        for (int j = 1; j < n; ++j)
            if (std::abs(v[j]) > std::abs(v[jmax])) jmax = j;
        double scale = (v[jmax] > 0 ? 1.0 : -1.0) / std::sqrt(grid.spacing);
        for (int j = 0; j < n; ++j) phi_[j] = scale * v[j];
    }
}

double SpectralDecomposition::rho_squared() const {
    if (n_bound_ != 1)
        throw spectral_error("expected exactly one negative eigenvalue, found " +
                             std::to_string(n_bound_));
    return -evals_[0];
}

ComplexField SpectralDecomposition::project_discrete(const ComplexField& u) const {
    if (!(u.grid == grid_)) throw std::invalid_argument("grid mismatch");
    ComplexField out(grid_);
    const int n = grid_.n_points;
    for (int a = 0; a < n_bound_; ++a) {
        const double* v = &evecs_[(size_t)a * n];
        complexd c(0.0);
        for (int j = 0; j < n; ++j) c += v[j] * u[j];
        for (int j = 0; j < n; ++j) out[j] += c * v[j];
    }
    return out;
}

ComplexField SpectralDecomposition::project_continuous(const ComplexField& u) const {
    return u - project_discrete(u);
}

ComplexField SpectralDecomposition::apply_H(const ComplexField& u) const {
    if (!(u.grid == grid_)) throw std::invalid_argument("grid mismatch");
    const int n = grid_.n_points;
    const double ih2 = 1.0 / (grid_.spacing * grid_.spacing);
    ComplexField out(grid_);
    const double c[4] = {s0 * ih2, s1 * ih2, s2 * ih2, s3 * ih2};
    for (int j = 0; j < n; ++j) {
        complexd acc = (c[0] + vdiag_[j]) * u[j];
        for (int d = 1; d <= 3; ++d) {
            if (j - d >= 0) acc += c[d] * u[j - d];
            if (j + d < n) acc += c[d] * u[j + d];
        }
        out[j] = acc;
    }
    return out;
}

std::vector<complexd> SpectralDecomposition::to_modes(const ComplexField& u,
                                                      int n_modes) const {
    const int n = grid_.n_points;
    std::vector<double> re(n), im(n), cre(n_modes), cim(n_modes);
    for (int j = 0; j < n; ++j) {
        re[j] = u[j].real();
        im[j] = u[j].imag();
    }
    cblas_dgemv(CblasColMajor, CblasTrans, n, n_modes, 1.0, evecs_.data(), n,
                re.data(), 1, 0.0, cre.data(), 1);
    cblas_dgemv(CblasColMajor, CblasTrans, n, n_modes, 1.0, evecs_.data(), n,
                im.data(), 1, 0.0, cim.data(), 1);
    std::vector<complexd> c(n_modes);
    for (int a = 0; a < n_modes; ++a) c[a] = complexd(cre[a], cim[a]);
    return c;
}

ComplexField SpectralDecomposition::from_modes(const std::vector<complexd>& c) const {
    const int n = grid_.n_points;
    const int m = (int)c.size();
    std::vector<double> cre(m), cim(m), re(n), im(n);
    for (int a = 0; a < m; ++a) {
        cre[a] = c[a].real();
        cim[a] = c[a].imag();
    }
    cblas_dgemv(CblasColMajor, CblasNoTrans, n, m, 1.0, evecs_.data(), n,
                cre.data(), 1, 0.0, re.data(), 1);
    cblas_dgemv(CblasColMajor, CblasNoTrans, n, m, 1.0, evecs_.data(), n,
                cim.data(), 1, 0.0, im.data(), 1);
    ComplexField out(grid_);
    for (int j = 0; j < n; ++j) out[j] = complexd(re[j], im[j]);
    return out;
}

int SpectralDecomposition::modes_below(double lambda_cut) const {
    return (int)(std::upper_bound(evals_.begin(), evals_.end(), lambda_cut) -
                 evals_.begin());
}

ComplexField SpectralDecomposition::propagate(const ComplexField& u, double t,
                                              std::optional<double> lambda_cut) const {
    const int m = lambda_cut ? modes_below(*lambda_cut) : grid_.n_points;
    auto c = to_modes(u, m);
    for (int a = 0; a < m; ++a)
        c[a] *= std::exp(complexd(0.0, evals_[a] * t));
    return from_modes(c);
}

ComplexField SpectralDecomposition::resolvent_continuous(const ComplexField& u,
                                                         double E) const {
    const int n = grid_.n_points;
    auto c = to_modes(u, n);
    for (int a = 0; a < n; ++a) {
        if (a < n_bound_) {
            c[a] = 0.0;
            continue;
        }
        double d = evals_[a] - E;
        if (std::abs(d) < 1e-10)
            throw spectral_error("resolvent_continuous: E collides with spectrum");
        c[a] /= d;
    }
    return from_modes(c);
}

// ---------------------------------------------------------------------------

DistortedTransform::DistortedTransform(const Potential& V, const SpatialGrid& grid,
                                       const FrequencyGrid& kgrid, bool parallel)
    : grid_(grid),
      kgrid_(kgrid),
      jost_(parallel ? solve_jost(V, grid, kgrid) : solve_jost_serial(V, grid, kgrid)),
      scat_(compute_scattering(jost_, V, grid)),
      parallel_(parallel) {
    const int n = grid.n_points, m = kgrid.m_points;
    const double norm = 1.0 / std::sqrt(two_pi);
    kern_.resize((size_t)n * m);
    for (int i = 0; i < m; ++i) {
        const double ki = kgrid.k(i);
        // psi_+(x,k) for k >= 0, psi_-(x,-k) for k < 0;  psi_- at |k| lives on
        // the mirror column and e^{-i|k|x} = e^{i k x}
        const int src = ki >= 0 ? i : kgrid.mirror(i);
        const complexd T = scat_.T[src];
        const auto& mvals = ki >= 0 ? jost_.at(src).m_plus : jost_.at(src).m_minus;
        complexd* col = &kern_[(size_t)i * n];
        for (int j = 0; j < n; ++j)
            col[j] = norm * T * std::exp(complexd(0.0, ki * grid.x(j))) * mvals[j];
    }
}

std::vector<complexd> DistortedTransform::forward_serial(const ComplexField& u) const {
    if (!(u.grid == grid_)) throw std::invalid_argument("grid mismatch");
    const int n = grid_.n_points, m = kgrid_.m_points;
    std::vector<complexd> ut(m);
    for (int i = 0; i < m; ++i) {
        const complexd* col = &kern_[(size_t)i * n];
        complexd acc(0.0);
        for (int j = 0; j < n; ++j) acc += std::conj(col[j]) * u[j];
        ut[i] = grid_.spacing * acc;
    }
    return ut;
}

std::vector<complexd> DistortedTransform::forward(const ComplexField& u) const {
    if (!parallel_) return forward_serial(u);
    if (!(u.grid == grid_)) throw std::invalid_argument("grid mismatch");
    const int n = grid_.n_points, m = kgrid_.m_points;
    std::vector<complexd> ut(m);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < m; ++i) {
        const complexd* col = &kern_[(size_t)i * n];
        complexd acc(0.0);
        for (int j = 0; j < n; ++j) acc += std::conj(col[j]) * u[j];
        ut[i] = grid_.spacing * acc;
    }
    return ut;
}

ComplexField DistortedTransform::inverse_serial(const std::vector<complexd>& ut) const {
    const int n = grid_.n_points, m = kgrid_.m_points;
    if ((int)ut.size() != m) throw std::invalid_argument("coefficient size mismatch");
    ComplexField u(grid_);
    for (int j = 0; j < n; ++j) {
        complexd acc(0.0);
        for (int i = 0; i < m; ++i) acc += kern_[(size_t)i * n + j] * ut[i];
        u[j] = kgrid_.spacing * acc;
    }
    return u;
}

ComplexField DistortedTransform::inverse(const std::vector<complexd>& ut) const {
    if (!parallel_) return inverse_serial(ut);
    const int n = grid_.n_points, m = kgrid_.m_points;
    if ((int)ut.size() != m) throw std::invalid_argument("coefficient size mismatch");
    ComplexField u(grid_);
#pragma omp parallel for schedule(static)
    for (int j = 0; j < n; ++j) {
        complexd acc(0.0);
        for (int i = 0; i < m; ++i) acc += kern_[(size_t)i * n + j] * ut[i];
        u[j] = kgrid_.spacing * acc;
    }
    return u;
}

ComplexField DistortedTransform::propagate(const ComplexField& u, double t) const {
    auto ut = forward(u);
    for (int i = 0; i < kgrid_.m_points; ++i) {
        double k = kgrid_.k(i);
        ut[i] *= std::exp(complexd(0.0, k * k * t));
    }
    return inverse(ut);
}

// ---------------------------------------------------------------------------

complexd ResolventGreen::kernel(int j, int l) const {
    int hi = std::max(j, l), lo = std::min(j, l);
    complexd phase = std::exp(complexd(0.0, 1.0) * k * (grid.x(hi) - grid.x(lo)));
    return phase * m_plus[hi] * m_minus[lo] / W;
}

ComplexField ResolventGreen::apply(const ComplexField& f) const {
    if (!(f.grid == grid)) throw std::invalid_argument("grid mismatch");
    const int n = grid.n_points;
    const double h = grid.spacing;
    const complexd eh = std::exp(complexd(0.0, 1.0) * k * h); // |eh| <= 1
    const complexd e2h = eh * eh;

    std::vector<complexd> gm(n), gp(n), IA(n);
    for (int j = 0; j < n; ++j) {
        gm[j] = m_minus[j] * f[j];
        gp[j] = m_plus[j] * f[j];
    }
    // IA_j ~ int_{-L}^{x_j} e^{ik(x_j - y)} m_-(y) f(y) dy / h
    complexd S(0.0);
    for (int j = 0; j < n; ++j) {
        S = eh * S + gm[j];
        complexd acc = S + gw0 * gm[j];
        if (j >= 2) acc += gw1 * eh * gm[j - 1] + gw2 * e2h * gm[j - 2];
        IA[j] = acc;
    }
    ComplexField out(grid);
    S = 0.0;
    for (int j = n - 1; j >= 0; --j) {
        S = eh * S + gp[j];
        complexd IB = S + gw0 * gp[j];
        if (j + 2 < n) IB += gw1 * eh * gp[j + 1] + gw2 * e2h * gp[j + 2];
        out[j] = h * (m_plus[j] * IA[j] + m_minus[j] * IB) / W;
    }
    return out;
}

ResolventGreen resolvent_green(const Potential& V, const SpatialGrid& grid,
                               complexd k) {
    if (k.imag() < 0.0)
        throw std::invalid_argument("resolvent_green: need Im k >= 0");
    FineSampling fv = make_fine_sampling(V, grid, std::max(1.0, std::abs(k)));
    JostColumn col = jost_column(fv, k);
    ResolventGreen rg;
    rg.grid = grid;
    rg.k = k;
    rg.m_plus = std::move(col.m_plus);
    rg.m_minus = std::move(col.m_minus);
    rg.dm_plus = std::move(col.dm_plus);
    rg.dm_minus = std::move(col.dm_minus);
    const int n = grid.n_points;
    const complexd two_ik = complexd(0.0, 2.0) * k;
    // W = m+ m-' - m+' m- - 2ik m+ m-  (constant in x when the march is exact)
    auto Wat = [&](int j) {
        return rg.m_plus[j] * rg.dm_minus[j] - rg.dm_plus[j] * rg.m_minus[j] -
               two_ik * rg.m_plus[j] * rg.m_minus[j];
    };
    rg.W = Wat(n / 2);
    double var = 0.0;
    for (int j = n / 10; j < n - n / 10; ++j)
        var = std::max(var, std::abs(Wat(j) - rg.W));
    rg.wronskian_variation = var / std::abs(rg.W);
    if (rg.wronskian_variation > 1e-4)
        throw inconsistency_error("resolvent_green: Wronskian not constant");
    if (std::abs(rg.W) < 1e-10)
        throw spectral_error("resolvent_green: vanishing Wronskian (k at an eigenvalue?)");
    return rg;
}

// ---------------------------------------------------------------------------

namespace {

// Numerov march of u'' = w u from i0 toward i1 (inclusive), given the two
// starting values already stored; rescales to avoid overflow.
void numerov_march(std::vector<double>& u, const std::vector<double>& w, double h,
                   int i0, int i1) {
    const double h2 = h * h;
    int step = i1 > i0 ? 1 : -1;
    for (int i = i0 + step; step > 0 ? i + 1 <= i1 : i - 1 >= i1; i += step) {
        double a = 2.0 * u[i] * (1.0 + 5.0 * h2 * w[i] / 12.0);
        double b = u[i - step] * (1.0 - h2 * w[i - step] / 12.0);
        u[i + step] = (a - b) / (1.0 - h2 * w[i + step] / 12.0);
        if (std::abs(u[i + step]) > 1e200) {
            for (int l = std::min(i0, i1); l <= std::max(i0, i1); ++l) u[l] *= 1e-200;
        }
    }
}

} // namespace

double shoot_ground_state(const Potential& V, double half_width, int n_points) {
    if (n_points % 2 != 0) ++n_points;
    const int n = n_points;            // nodes 0..n, center at n/2
    const double h = 2.0 * half_width / n;
    auto x = [&](int i) { return -half_width + i * h; };
    const int c = n / 2;

    std::vector<double> w(n + 1), uL(n + 1), uR(n + 1);
    auto mismatch = [&](double E) {
        double kap = std::sqrt(-E);
        for (int i = 0; i <= n; ++i) w[i] = V(x(i)) - E;
        std::fill(uL.begin(), uL.end(), 0.0);
        std::fill(uR.begin(), uR.end(), 0.0);
        uL[0] = 1.0;
        uL[1] = std::exp(kap * h);
        numerov_march(uL, w, h, 1, c + 2);
        uR[n] = 1.0;
        uR[n - 1] = std::exp(kap * h);
        numerov_march(uR, w, h, n - 1, c - 2);
        auto d4 = [&](const std::vector<double>& u) {
            return (u[c - 2] - 8.0 * u[c - 1] + 8.0 * u[c + 1] - u[c + 2]) / (12.0 * h);
        };
        return d4(uL) * uR[c] - d4(uR) * uL[c];
    };

    // bracket the ground state inside (-max depth, 0)
    double depth = 0.0;
    for (int i = 0; i <= n; ++i) depth = std::max(depth, -V(x(i)));
    if (depth <= 0.0) throw spectral_error("shoot_ground_state: no well");
    const int scan = 400;
    double Ea = 0.0, Eb = 0.0, Fa = 0.0;
    bool found = false;
    for (int s = 1; s <= scan; ++s) {
        double E = -depth + (depth - 1e-9) * s / scan - 1e-9;
        double F = mismatch(E);
        if (s > 1 && Fa * F < 0.0) {
            Eb = E;
            found = true;
            break;
        }
        Ea = E;
        Fa = F;
    }
    if (!found) throw spectral_error("shoot_ground_state: no sign change found");
    for (int it = 0; it < 200 && Eb - Ea > 1e-13; ++it) {
        double Em = 0.5 * (Ea + Eb);
        double Fm = mismatch(Em);
        if (Fa * Fm <= 0.0)
            Eb = Em;
        else {
            Ea = Em;
            Fa = Fm;
        }
    }
    return -0.5 * (Ea + Eb);
}

} // namespace nlslab
