#include "nlslab/asymptotics.hpp"

#include <algorithm>
#include <cmath>

namespace nlslab {

namespace {

const complexd kI(0.0, 1.0);

double bracket2(double x) { return 1.0 + x * x; } // <x>^2

// smooth cutoff: 1 on [0,1], cos^2 ramp on [1,2], 0 beyond
double phi1_of(double lam) {
    double a = std::abs(lam);
    if (a <= 1.0) return 1.0;
    if (a >= 2.0) return 0.0;
    double c = std::cos(0.5 * M_PI * (a - 1.0));
    return c * c;
}

} // namespace

std::vector<complexd> compute_profile(const ComplexField& eta, double t,
                                      const DistortedTransform& tf,
                                      const SpectralDecomposition* dec) {
    std::vector<complexd> ut =
        dec ? tf.forward(dec->project_continuous(eta)) : tf.forward(eta);
    for (int i = 0; i < tf.kgrid().m_points; ++i) {
        double k = tf.kgrid().k(i);
        ut[i] *= std::exp(complexd(0.0, -t * k * k));
    }
    return ut;
}

ProfileSeries make_profile_series(const std::vector<double>& times,
                                  const std::vector<ComplexField>& etas,
                                  const DistortedTransform& tf,
                                  const SpectralDecomposition* dec) {
    if (times.size() != etas.size())
        throw std::invalid_argument("make_profile_series: size mismatch");
    ProfileSeries s;
    s.times = times;
    s.kgrid = tf.kgrid();
    s.f.reserve(times.size());
    for (size_t i = 0; i < times.size(); ++i)
        s.f.push_back(compute_profile(etas[i], times[i], tf, dec));
    return s;
}

ModifiedProfile modified_profile(ProfileSeries& series, double alpha) {
    size_t nt = series.times.size();
    if (nt < 3) throw std::invalid_argument("modified_profile: need >= 3 times");
    int m = series.kgrid.m_points;

    series.phase.assign(nt, std::vector<double>(m, 0.0));
    series.w.assign(nt, std::vector<complexd>(m));
    // head: the integrand on [0, t_first] approximated by its value at
    // t_first, giving |f~(t_first)|^2 log(1 + t_first)
    double t0 = series.times[0];
    for (int j = 0; j < m; ++j)
        series.phase[0][j] = std::norm(series.f[0][j]) * std::log1p(t0);
    for (size_t i = 1; i < nt; ++i) {
        double dt = series.times[i] - series.times[i - 1];
        for (int j = 0; j < m; ++j) {
            double g0 = std::norm(series.f[i - 1][j]) / (1.0 + series.times[i - 1]);
            double g1 = std::norm(series.f[i][j]) / (1.0 + series.times[i]);
            series.phase[i][j] = series.phase[i - 1][j] + 0.5 * dt * (g0 + g1);
        }
    }
    for (size_t i = 0; i < nt; ++i)
        for (int j = 0; j < m; ++j)
            series.w[i][j] =
                std::exp(complexd(0.0, 0.5 * series.phase[i][j])) * series.f[i][j];

    ModifiedProfile out;
    out.W_inf = series.w.back();
    for (size_t i = 0; i < nt; ++i) {
        double T = series.times[i];
        if (T <= 0.0) continue;
        for (size_t l = i + 1; l < nt; ++l) {
            if (std::abs(series.times[l] - 2.0 * T) > 1e-9 * (1.0 + T)) continue;
            double kmin = std::pow(T, -3.0 * alpha), gap = 0.0;
            for (int j = 0; j < m; ++j)
                if (std::abs(series.kgrid.k(j)) >= kmin)
                    gap = std::max(gap, std::abs(series.w[l][j] - series.w[i][j]));
            out.cauchy_gaps.emplace_back(T, gap);
            break;
        }
    }
    return out;
}

PowerLawFit fit_power_law(const std::vector<double>& times,
                          const std::vector<double>& values, double t_a, double t_b) {
    if (times.size() != values.size())
        throw std::invalid_argument("fit_power_law: size mismatch");
    std::vector<double> lx, ly;
    for (size_t i = 0; i < times.size(); ++i) {
        if (times[i] < t_a || times[i] > t_b) continue;
        if (values[i] <= 0.0 || times[i] <= 0.0)
            throw std::invalid_argument("fit_power_law: nonpositive sample");
        lx.push_back(std::log(times[i]));
        ly.push_back(std::log(values[i]));
    }
    size_t n = lx.size();
    if (n < 8) throw std::invalid_argument("fit_power_law: fewer than 8 samples in window");
    double mx = 0, my = 0;
    for (size_t i = 0; i < n; ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= (double)n;
    my /= (double)n;
    double sxx = 0, sxy = 0, syy = 0;
    for (size_t i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    PowerLawFit fit;
    fit.exponent = sxy / sxx;
    fit.log_amplitude = my - fit.exponent * mx;
    fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return fit;
}

DecayDiagnostics decay_diagnostics(const std::vector<double>& times,
                                   const std::vector<ComplexField>& etas) {
    if (times.size() != etas.size())
        throw std::invalid_argument("decay_diagnostics: size mismatch");
    DecayDiagnostics d;
    d.times = times;
    size_t nt = times.size();
    if (nt == 0) return d;
    const SpatialGrid& grid = etas[0].grid;
    int n = grid.n_points;

    std::vector<double> acc(n, 0.0); // running int_0^T |eta|^2 dt per node
    for (size_t i = 0; i < nt; ++i) {
        const ComplexField& e = etas[i];
        ComplexField de = spatial_derivative(e, 1);
        double s = 0, ws = 0, wd = 0;
        for (int j = 0; j < n; ++j) {
            double a = std::abs(e[j]), b2 = bracket2(grid.x(j));
            s = std::max(s, a);
            ws = std::max(ws, a / b2);
            wd += std::norm(de[j]) / b2;
        }
        d.sup.push_back(s);
        d.weighted_sup.push_back(ws);
        d.weighted_deriv.push_back(std::sqrt(wd * grid.spacing));
        if (i > 0) {
            double dt = times[i] - times[i - 1];
            for (int j = 0; j < n; ++j)
                acc[j] += 0.5 * dt * (std::norm(etas[i - 1][j]) + std::norm(e[j]));
        }
        double sm = 0;
        for (int j = 0; j < n; ++j)
            sm = std::max(sm, std::sqrt(acc[j] / bracket2(grid.x(j))));
        d.smoothing.push_back(sm);
    }
    return d;
}

DecayDiagnostics decay_diagnostics(const Trajectory& traj, const ModulationPath& path) {
    std::vector<ComplexField> etas;
    etas.reserve(path.states.size());
    for (const ModulationState& st : path.states) etas.push_back(st.eta);
    return decay_diagnostics(traj.times, etas);
}

SmoothingFunctionals linear_smoothing_functionals(const ComplexField& h,
                                                  const DistortedTransform& tf,
                                                  double t_max, double dt) {
    const FrequencyGrid& kg = tf.kgrid();
    const SpatialGrid& grid = tf.grid();
    int m = kg.m_points, n = grid.n_points;
    std::vector<complexd> ht = tf.forward(h);

    // accumulate |t g(t,x)|^2 dt per node for each multiplier
    std::vector<std::vector<double>> acc(4, std::vector<double>(n, 0.0));
    std::vector<complexd> row(m);
    long steps = std::lround(t_max / dt);
    for (long s = 1; s <= steps; ++s) {
        double t = (double)s * dt;
        for (int which = 0; which < 4; ++which) {
            for (int i = 0; i < m; ++i) {
                double k = kg.k(i), lam = k * k;
                complexd mult;
                switch (which) {
                    case 0: mult = kI * lam * phi1_of(lam); break;            // d_t low
                    case 1: mult = -lam * lam * phi1_of(lam); break;          // d_t^2 low
                    case 2: mult = 1.0 - phi1_of(lam); break;                 // high
                    case 3: mult = kI * k * (1.0 - phi1_of(lam)); break;      // d_x high
                }
                row[i] = mult * std::exp(complexd(0.0, lam * t)) * ht[i];
            }
            ComplexField g = tf.inverse(row);
            for (int j = 0; j < n; ++j) acc[which][j] += t * t * std::norm(g[j]) * dt;
        }
    }
    SmoothingFunctionals out;
    double w0 = 0, w1 = 0, w2 = 0, w3 = 0;
    for (int j = 0; j < n; ++j) {
        double b2 = bracket2(grid.x(j));
        w0 = std::max(w0, std::sqrt(acc[0][j]) / b2);
        w1 = std::max(w1, std::sqrt(acc[1][j]) / b2);
        w2 = std::max(w2, std::sqrt(acc[2][j]) / b2);
        w3 = std::max(w3, std::sqrt(acc[3][j]) / b2);
    }
    out.low_j1 = w0;
    out.low_j2 = w1;
    out.high_j0 = w2;
    out.high_j1 = w3;
    return out;
}

ResonanceCheck cubic_resonance_check(const std::vector<double>& times,
                                     const std::vector<ComplexField>& fields,
                                     const ProfileSeries& series, double k_lo,
                                     double k_hi, const DistortedTransform& tf,
                                     const SpectralDecomposition* dec, double alpha) {
    if (times.size() != fields.size() || times.size() != series.times.size())
        throw std::invalid_argument("cubic_resonance_check: size mismatch");
    double t_max = times.back();
    if (k_lo < std::pow(t_max, -3.0 * alpha))
        throw std::invalid_argument("cubic_resonance_check: band reaches below t^{-3 alpha}");
    const FrequencyGrid& kg = tf.kgrid();
    if (k_hi > kg.band_limit)
        throw std::invalid_argument("cubic_resonance_check: band outside the frequency grid");

    ResonanceCheck out;
    for (size_t i = 0; i < times.size(); ++i) {
        double t = times[i];
        if (t <= 0.0) continue;
        const ComplexField& u = fields[i];
        ComplexField N = u * conj(u) * u;
        std::vector<complexd> g = compute_profile(N, t, tf, dec);
        double dev = 0, main = 0;
        for (int j = 0; j < kg.m_points; ++j) {
            double ak = std::abs(kg.k(j));
            if (ak < k_lo || ak > k_hi) continue;
            complexd f = series.f[i][j];
            complexd cubic = (0.5 / t) * std::norm(f) * f;
            dev = std::max(dev, std::abs(g[j] - cubic));
            main = std::max(main, std::abs(cubic));
        }
        out.times.push_back(t);
        out.deviation.push_back(dev);
        out.main_term.push_back(main);
    }
    return out;
}

namespace {

complexd interp_profile(const std::vector<complexd>& W, const FrequencyGrid& kg,
                        double k) {
    double pos = (k + kg.band_limit) / kg.spacing - 0.5;
    int i = (int)std::floor(pos);
    if (i < 0 || i + 1 >= kg.m_points) return complexd(0.0, 0.0);
    double s = pos - i;
    return (1.0 - s) * W[i] + s * W[i + 1];
}

complexd far_field_value(double x, double t, const std::vector<complexd>& W,
                         const FrequencyGrid& kg, const FarFieldConvention& c) {
    complexd Wk = interp_profile(W, kg, c.map_sign * x / (2.0 * t));
    // stationary phase of e^{s_p i k^2 t}: e^{s_p i x^2/4t} pairs with (s_p 2it)^{-1/2}
    complexd amp = 1.0 / std::sqrt(complexd(0.0, 2.0 * c.phase_sign * t));
    complexd osc = std::exp(complexd(0.0, c.phase_sign * x * x / (4.0 * t)));
    complexd mod = std::exp(complexd(0.0, -0.5 * c.phase_sign * std::norm(Wk) * std::log(t)));
    return amp * osc * mod * Wk;
}

} // namespace

FarFieldResult far_field_check(const ComplexField& eta, double t,
                               const std::vector<complexd>& W,
                               const FrequencyGrid& kgrid, FarFieldConvention conv,
                               double alpha) {
    const SpatialGrid& grid = eta.grid;
    double x_lo = 0.2 * t * std::pow(t, -3.0 * alpha);
    double x_hi = std::min(2.0 * grid.half_width / 3.0, 2.0 * t * kgrid.band_limit);
    if (x_lo >= x_hi) throw std::invalid_argument("far_field_check: empty region");

    FarFieldResult out;
    out.x_lo = x_lo;
    out.x_hi = x_hi;
    for (int j = 0; j < grid.n_points; ++j) {
        double x = grid.x(j), ax = std::abs(x);
        if (ax < x_lo || ax > x_hi) continue;
        out.sup_eta = std::max(out.sup_eta, std::abs(eta[j]));
        out.sup_error =
            std::max(out.sup_error, std::abs(eta[j] - far_field_value(x, t, W, kgrid, conv)));
    }
    return out;
}

FarFieldConvention resolve_far_field_convention(const ComplexField& eta_lin, double t,
                                                const std::vector<complexd>& W,
                                                const FrequencyGrid& kgrid,
                                                double alpha) {
    FarFieldConvention best;
    double best_err = -1.0;
    for (int ms : {-1, 1}) {
        for (int ps : {-1, 1}) {
            FarFieldConvention c{ms, ps};
            FarFieldResult r = far_field_check(eta_lin, t, W, kgrid, c, alpha);
            double rel = r.sup_error / std::max(r.sup_eta, 1e-300);
            if (best_err < 0.0 || rel < best_err) {
                best_err = rel;
                best = c;
            }
        }
    }
    if (best_err > 0.1)
        throw inconsistency_error("far-field resolver: no convention matches the linear run");
    return best;
}

TimeFrequencySplit time_frequency_split(const std::vector<double>& times,
                                        const std::vector<ComplexField>& fields,
                                        double cutoff, double E_const,
                                        const std::vector<double>* E_series) {
    size_t nt = times.size();
    if (nt < 8 || fields.size() != nt)
        throw std::invalid_argument("time_frequency_split: need >= 8 uniform snapshots");
    double dt = times[1] - times[0];
    for (size_t i = 1; i < nt; ++i)
        if (std::abs(times[i] - times[i - 1] - dt) > 1e-9 * std::max(1.0, dt))
            throw std::invalid_argument("time_frequency_split: non-uniform sampling");
    if (cutoff <= 0.0) throw std::invalid_argument("time_frequency_split: cutoff must be > 0");

    const SpatialGrid& grid = fields[0].grid;
    int n = grid.n_points;
    int N = (int)nt;

    // Tukey window, taper fraction 0.1 (0.05 N ramp each end)
    int ramp = std::max(1, (int)std::llround(0.05 * N));
    std::vector<double> win(N, 1.0);
    for (int i = 0; i < ramp; ++i) {
        double s = std::sin(0.5 * M_PI * (i + 1) / (double)(ramp + 1));
        win[i] = win[N - 1 - i] = s * s;
    }

    // temporal mean kept in the low part so constant data has no high part
    std::vector<complexd> mean(n, complexd(0.0, 0.0));
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < n; ++j) mean[j] += fields[i][j];
    for (int j = 0; j < n; ++j) mean[j] /= (double)N;

    // DFT in t per node of the windowed, mean-free signal
    std::vector<complexd> F((size_t)N * n);
    std::vector<complexd> tw(N);
    for (int q = 0; q < N; ++q) tw[q] = std::exp(complexd(0.0, -2.0 * M_PI * q / (double)N));
    for (int j = 0; j < n; ++j) {
        for (int p = 0; p < N; ++p) {
            complexd s(0.0, 0.0);
            for (int i = 0; i < N; ++i)
                s += win[i] * (fields[i][j] - mean[j]) * tw[(size_t)p * i % N];
            F[(size_t)p * n + j] = s / (double)N;
        }
    }

    auto tau_of = [&](int p) {
        int q = (p <= N / 2) ? p : p - N;
        return 2.0 * M_PI * q / ((double)N * dt);
    };
    auto idft = [&](int i, int j, auto mult) {
        complexd s(0.0, 0.0);
        for (int p = 0; p < N; ++p)
            s += mult(tau_of(p)) * F[(size_t)p * n + j] * std::conj(tw[(size_t)p * i % N]);
        return s;
    };

    TimeFrequencySplit out;
    out.low.reserve(nt);
    out.high.reserve(nt);
    std::vector<ComplexField> dlow1, dlow2;
    for (int i = 0; i < N; ++i) {
        ComplexField lo(grid), hi(grid), d1(grid), d2(grid);
        for (int j = 0; j < n; ++j) {
            auto p1 = [&](double tau) { return phi1_of(tau / cutoff); };
            lo[j] = mean[j] + idft(i, j, [&](double tau) { return complexd(p1(tau), 0.0); });
            hi[j] = idft(i, j, [&](double tau) { return complexd(1.0 - p1(tau), 0.0); });
            d1[j] = idft(i, j, [&](double tau) { return kI * tau * p1(tau); });
            d2[j] = idft(i, j, [&](double tau) { return complexd(-tau * tau * p1(tau), 0.0); });
        }
        out.low.push_back(std::move(lo));
        out.high.push_back(std::move(hi));
        dlow1.push_back(std::move(d1));
        dlow2.push_back(std::move(d2));
        if (win[i] == 1.0) out.interior.push_back(i);
    }

    std::vector<double> a3(n, 0.0), a40(n, 0.0), a41(n, 0.0);
    for (int idx : out.interior) {
        double t = times[idx];
        double E = E_series ? (*E_series)[idx] : E_const;
        ComplexField dh = spatial_derivative(out.high[idx], 1);
        for (int j = 0; j < n; ++j) {
            complexd b3 = -2.0 * kI * E * dlow1[idx][j] + dlow2[idx][j];
            a3[j] += t * t * std::norm(b3) * dt;
            a40[j] += t * t * std::norm(out.high[idx][j]) * dt;
            a41[j] += t * t * std::norm(dh[j]) * dt;
        }
    }
    for (int j = 0; j < n; ++j) {
        double b2 = bracket2(grid.x(j));
        out.boot3 = std::max(out.boot3, std::sqrt(a3[j]) / b2);
        out.boot4_j0 = std::max(out.boot4_j0, std::sqrt(a40[j]) / b2);
        out.boot4_j1 = std::max(out.boot4_j1, std::sqrt(a41[j]) / b2);
    }
    return out;
}

} // namespace nlslab
