#include "nlslab/field.hpp"

#include <algorithm>
#include <stdexcept>

namespace nlslab {

SpatialGrid::SpatialGrid(double L, int n) : half_width(L), n_points(n) {
    if (n < 64 || n % 2 != 0)
        throw std::invalid_argument("SpatialGrid: n_points must be even and >= 64");
    if (!(L > 0.0))
        throw std::invalid_argument("SpatialGrid: half_width must be positive");
    spacing = 2.0 * L / n;
}

FrequencyGrid::FrequencyGrid(double K, int m) : band_limit(K), m_points(m) {
    if (m < 2 || m % 2 != 0)
        throw std::invalid_argument("FrequencyGrid: m_points must be even and >= 2");
    if (!(K > 0.0))
        throw std::invalid_argument("FrequencyGrid: band_limit must be positive");
    spacing = 2.0 * K / m;
}

ComplexField::ComplexField(const SpatialGrid& g, std::function<complexd(double)> f)
    : grid(g), values(g.n_points) {
    for (int j = 0; j < g.n_points; ++j) values[j] = f(g.x(j));
}

bool ComplexField::all_finite() const {
    for (const auto& v : values)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
}

complexd inner_product(const ComplexField& a, const ComplexField& b,
                       InnerProductKind kind) {
    if (!(a.grid == b.grid))
        throw std::invalid_argument("inner_product: grid mismatch");
    complexd s(0.0, 0.0);
    for (int j = 0; j < a.size(); ++j) s += std::conj(a[j]) * b[j];
    s *= a.grid.spacing;
    if (kind == InnerProductKind::reduced) return complexd(s.real(), 0.0);
    return s;
}

double l2_norm(const ComplexField& u) {
    double s = 0.0;
    for (const auto& v : u.values) s += std::norm(v);
    return std::sqrt(s * u.grid.spacing);
}

double sup_norm(const ComplexField& u) {
    double m = 0.0;
    for (const auto& v : u.values) m = std::max(m, std::abs(v));
    return m;
}

double weighted_sup_norm(const ComplexField& u, double sigma) {
    if (sigma < 0.0)
        throw std::invalid_argument("weighted_sup_norm: sigma must be >= 0");
    double m = 0.0;
    for (int j = 0; j < u.size(); ++j) {
        double x = u.grid.x(j);
        double w = std::pow(1.0 + x * x, -0.5 * sigma);
        m = std::max(m, w * std::abs(u[j]));
    }
    return m;
}

namespace {

// Fornberg finite-difference weights for derivative m at x0 = 0 from
// sample offsets xs (in units of h).
std::vector<double> fd_weights(int m, const std::vector<double>& xs) {
    const int n = (int)xs.size();
    std::vector<std::vector<double>> c(n, std::vector<double>(m + 1, 0.0));
    double c1 = 1.0;
    c[0][0] = 1.0;
    for (int i = 1; i < n; ++i) {
        double c2 = 1.0;
        // row i must be formed from row i-1 before that row is updated
        std::vector<double> prev = c[i - 1];
        for (int j = 0; j < i; ++j) {
            double c3 = xs[i] - xs[j];
            c2 *= c3;
            for (int k = std::min(i, m); k >= 1; --k)
                c[j][k] = (xs[i] * c[j][k] - k * c[j][k - 1]) / c3;
            c[j][0] = xs[i] * c[j][0] / c3;
        }
        for (int k = std::min(i, m); k >= 1; --k)
            c[i][k] = c1 * (k * prev[k - 1] - xs[i - 1] * prev[k]) / c2;
        c[i][0] = -c1 * xs[i - 1] * prev[0] / c2;
        c1 = c2;
    }
    std::vector<double> w(n);
    for (int j = 0; j < n; ++j) w[j] = c[j][m];
    return w;
}

} // namespace

ComplexField spatial_derivative(const ComplexField& u, int order) {
    if (order != 1 && order != 2)
        throw std::invalid_argument("spatial_derivative: order must be 1 or 2");
    const int n = u.size();
    const double h = u.grid.spacing;
    const int width = order + 4; // 4th-order accuracy
    ComplexField d(u.grid);
    if (order == 1) {
        const double inv = 1.0 / h;
        for (int j = 2; j < n - 2; ++j)
            d[j] = inv * ((u[j - 2] - u[j + 2]) / 12.0 +
                          (u[j + 1] - u[j - 1]) * (2.0 / 3.0));
    } else {
        const double inv = 1.0 / (h * h);
        for (int j = 2; j < n - 2; ++j)
            d[j] = inv * (-(u[j - 2] + u[j + 2]) / 12.0 +
                          (u[j + 1] + u[j - 1]) * (4.0 / 3.0) - 2.5 * u[j]);
    }
    // one-sided closures at the edges
    const double scale = (order == 1) ? 1.0 / h : 1.0 / (h * h);
    for (int r = 0; r < 2; ++r) {
        std::vector<double> xs(width);
        for (int c = 0; c < width; ++c) xs[c] = double(c - r);
        auto wl = fd_weights(order, xs);
        for (int c = 0; c < width; ++c) xs[c] = double(r - c);
        auto wr = fd_weights(order, xs);
        complexd sl(0.0), sr(0.0);
        for (int c = 0; c < width; ++c) {
            sl += wl[c] * u[c];
            sr += wr[c] * u[n - 1 - c];
        }
        d[r] = scale * sl;
        d[n - 1 - r] = scale * sr;
    }
    return d;
}

ComplexField operator+(const ComplexField& a, const ComplexField& b) {
    if (!(a.grid == b.grid)) throw std::invalid_argument("field +: grid mismatch");
    ComplexField r(a.grid);
    for (int j = 0; j < a.size(); ++j) r[j] = a[j] + b[j];
    return r;
}

ComplexField operator-(const ComplexField& a, const ComplexField& b) {
    if (!(a.grid == b.grid)) throw std::invalid_argument("field -: grid mismatch");
    ComplexField r(a.grid);
    for (int j = 0; j < a.size(); ++j) r[j] = a[j] - b[j];
    return r;
}

ComplexField operator*(complexd s, const ComplexField& a) {
    ComplexField r(a.grid);
    for (int j = 0; j < a.size(); ++j) r[j] = s * a[j];
    return r;
}

ComplexField operator*(const ComplexField& a, const ComplexField& b) {
    if (!(a.grid == b.grid)) throw std::invalid_argument("field *: grid mismatch");
    ComplexField r(a.grid);
    for (int j = 0; j < a.size(); ++j) r[j] = a[j] * b[j];
    return r;
}

ComplexField conj(const ComplexField& a) {
    ComplexField r(a.grid);
    for (int j = 0; j < a.size(); ++j) r[j] = std::conj(a[j]);
    return r;
}

double flat_tail_fraction(const ComplexField& u, double K) {
    const int n = u.size();
    const double h = u.grid.spacing;
    const double knyq = M_PI / h;
    if (K >= knyq) return 0.0;
    double total = 0.0;
    for (const auto& v : u.values) total += std::norm(v);
    if (total == 0.0) return 0.0;
    // sample the tail band at up to 128 probe frequencies per side and
    // integrate the spectral density estimate over the band
    const int nprobe = 128;
    const double dk = (knyq - K) / nprobe;
    double tail = 0.0;
    for (int p = 0; p < nprobe; ++p) {
        double k = K + (p + 0.5) * dk;
        complexd cp(0.0), cm(0.0);
        for (int j = 0; j < n; ++j) {
            double ph = k * u.grid.x(j);
            complexd e(std::cos(ph), -std::sin(ph));
            cp += e * u[j];
            cm += std::conj(e) * u[j];
        }
        tail += (std::norm(cp) + std::norm(cm)) * h * h / (2.0 * M_PI);
    }
    tail *= dk;
    return tail / (total * h);
}

} // namespace nlslab
