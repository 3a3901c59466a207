#pragma once

#include <complex>
#include <vector>
#include <cmath>
#include <functional>

#include "nlslab/errors.hpp"

namespace nlslab {

using complexd = std::complex<double>;

// Uniform 1D grid on [-L, L), right endpoint excluded (periodic
// convention, so the node count equals the number of quadrature cells).
// All quantities dimensionless.
struct SpatialGrid {
    double half_width = 0.0;
    int n_points = 0;
    double spacing = 0.0;

    SpatialGrid() = default;
    SpatialGrid(double L, int n);

    double x(int j) const { return -half_width + j * spacing; }
    bool operator==(const SpatialGrid&) const = default;
};

// Symmetric band [-K, K], nodes offset half a spacing so k = 0 is never
// a node: k_i = -K + (i + 1/2) dk.
struct FrequencyGrid {
    double band_limit = 0.0;
    int m_points = 0;
    double spacing = 0.0;

    FrequencyGrid() = default;
    FrequencyGrid(double K, int m);

    double k(int i) const { return -band_limit + (i + 0.5) * spacing; }
    // index of the node mirroring k(i) -> -k(i)
    int mirror(int i) const { return m_points - 1 - i; }
    bool operator==(const FrequencyGrid&) const = default;
};

// Complex samples on a SpatialGrid. Value type; cheap enough to copy at
// desk scale.
struct ComplexField {
    SpatialGrid grid;
    std::vector<complexd> values;

    ComplexField() = default;
    explicit ComplexField(const SpatialGrid& g)
        : grid(g), values(g.n_points, complexd(0.0, 0.0)) {}
    ComplexField(const SpatialGrid& g, std::function<complexd(double)> f);

    int size() const { return grid.n_points; }
    complexd& operator[](int j) { return values[j]; }
    const complexd& operator[](int j) const { return values[j]; }

    bool all_finite() const;
};

enum class InnerProductKind { complex_kind, reduced };

// (a,b) = \int conj(a) b dx by the periodic-rectangle rule; reduced kind
// takes the real part.
complexd inner_product(const ComplexField& a, const ComplexField& b,
                       InnerProductKind kind = InnerProductKind::complex_kind);

inline double reduced_inner(const ComplexField& a, const ComplexField& b) {
    return inner_product(a, b, InnerProductKind::reduced).real();
}

double l2_norm(const ComplexField& u);
double sup_norm(const ComplexField& u);

// max_j (1+x_j^2)^(-sigma/2) |u(x_j)|
double weighted_sup_norm(const ComplexField& u, double sigma);

// 4th-order centered differences, one-sided closures at the boundary.
ComplexField spatial_derivative(const ComplexField& u, int order);

// Field arithmetic used all over the experiment code.
ComplexField operator+(const ComplexField& a, const ComplexField& b);
ComplexField operator-(const ComplexField& a, const ComplexField& b);
ComplexField operator*(complexd s, const ComplexField& a);
// pointwise product / conjugate (nonlinearities, coefficient fields)
ComplexField operator*(const ComplexField& a, const ComplexField& b);
ComplexField conj(const ComplexField& a);

// Fraction of flat-Fourier energy above |k| = K, estimated by direct
// summation of the DFT over the tail band. Used as a band-limit guard.
double flat_tail_fraction(const ComplexField& u, double K);

} // namespace nlslab
