#pragma once

#include <string>
#include <vector>

#include "nlslab/field.hpp"

namespace nlslab {

enum class PotentialFamily { gaussian_well, sech2, bump, tabulated };

// Real potential V(x). The analytic families evaluate at arbitrary x,
// which the Jost marching uses to oversample; tabulated potentials
// interpolate linearly between their grid nodes.
class Potential {
  public:
    static Potential gaussian_well(double depth = 1.0, double width = 1.0);
    static Potential sech2(double depth = 2.0, double width = 1.0);
    static Potential bump(double height = 1.0, double width = 1.0);
    static Potential tabulated(const SpatialGrid& grid, std::vector<double> values);

    // preset addressable by name from experiment configs
    static Potential preset(const std::string& name);

    double operator()(double x) const;
    std::vector<double> sample(const SpatialGrid& grid) const;

    // |V| < tol on the outer 10% of the grid
    bool decayed_on(const SpatialGrid& grid, double tol = 1e-12) const;

    PotentialFamily family() const { return family_; }
    double amplitude() const { return amplitude_; }
    double width() const { return width_; }
    std::string name() const;

  private:
    Potential(PotentialFamily f, double a, double w) : family_(f), amplitude_(a), width_(w) {}
    PotentialFamily family_;
    double amplitude_; // signed: negative for wells
    double width_;
    SpatialGrid tab_grid_;
    std::vector<double> tab_values_;
};

} // namespace nlslab
