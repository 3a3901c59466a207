#include "nlslab/potential.hpp"

#include <cmath>
#include <stdexcept>

namespace nlslab {

Potential Potential::gaussian_well(double depth, double width) {
    if (!(depth >= 0.0) || !(width > 0.0))
        throw std::invalid_argument("gaussian_well: bad depth or width");
    return Potential(PotentialFamily::gaussian_well, -depth, width);
}

Potential Potential::sech2(double depth, double width) {
    if (!(depth > 0.0) || !(width > 0.0))
        throw std::invalid_argument("sech2: depth and width must be positive");
    return Potential(PotentialFamily::sech2, -depth, width);
}

Potential Potential::bump(double height, double width) {
    if (!(height > 0.0) || !(width > 0.0))
        throw std::invalid_argument("bump: height and width must be positive");
    return Potential(PotentialFamily::bump, height, width);
}

Potential Potential::tabulated(const SpatialGrid& grid, std::vector<double> values) {
    if ((int)values.size() != grid.n_points)
        throw std::invalid_argument("tabulated: value count must match grid");
    Potential p(PotentialFamily::tabulated, 0.0, 0.0);
    p.tab_grid_ = grid;
    p.tab_values_ = std::move(values);
    return p;
}

Potential Potential::preset(const std::string& name) {
    if (name == "gaussian_well") return gaussian_well(1.0, 1.0);
    if (name == "sech2") return sech2(2.0, 1.0);
    if (name == "reflectionless") return sech2(2.0, 1.0);
    if (name == "bump") return bump(1.0, 1.0);
    throw std::invalid_argument("unknown potential preset: " + name);
}

double Potential::operator()(double x) const {
    switch (family_) {
        case PotentialFamily::gaussian_well:
        case PotentialFamily::bump: {
            double s = x / width_;
            return amplitude_ * std::exp(-s * s);
        }
        case PotentialFamily::sech2: {
            double c = std::cosh(x / width_);
            return amplitude_ / (c * c);
        }
        case PotentialFamily::tabulated: {
            const auto& g = tab_grid_;
            double t = (x + g.half_width) / g.spacing;
            if (t <= 0.0) return tab_values_.front();
            if (t >= g.n_points - 1) return tab_values_.back();
            int j = (int)t;
            double f = t - j;
            return (1.0 - f) * tab_values_[j] + f * tab_values_[j + 1];
        }
    }
    return 0.0;
}

std::vector<double> Potential::sample(const SpatialGrid& grid) const {
    std::vector<double> v(grid.n_points);
    for (int j = 0; j < grid.n_points; ++j) v[j] = (*this)(grid.x(j));
    return v;
}

bool Potential::decayed_on(const SpatialGrid& grid, double tol) const {
    const int n = grid.n_points;
    const int edge = n / 20; // outer 10% split over the two sides
    for (int j = 0; j < edge; ++j) {
        if (std::abs((*this)(grid.x(j))) >= tol) return false;
        if (std::abs((*this)(grid.x(n - 1 - j))) >= tol) return false;
    }
    return true;
}

std::string Potential::name() const {
    switch (family_) {
        case PotentialFamily::gaussian_well: return "gaussian_well";
        case PotentialFamily::sech2: return "sech2";
        case PotentialFamily::bump: return "bump";
        case PotentialFamily::tabulated: return "tabulated";
    }
    return "?";
}

} // namespace nlslab
