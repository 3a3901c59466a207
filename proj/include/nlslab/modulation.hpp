#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "nlslab/boundstate.hpp"
#include "nlslab/evolution.hpp"

namespace nlslab {

// Soliton + radiation split of a single snapshot: u = Q[z] + eta with
// eta orthogonal to the family tangent in the reduced inner product,
// <i eta, D_j Q[z]> = 0.
struct ModulationState {
    double t = 0.0;
    complexd z;
    double E = 0.0;     // E[z]
    double theta = 0.0; // int_0^t E[z(s)] ds, trapezoid-accumulated
    ComplexField eta;
    std::array<double, 2> ortho_residual{};
};

struct ModulationPath {
    std::vector<ModulationState> states;
    std::vector<complexd> zdot;      // centered differences (one-sided ends)
    std::vector<double> defect;      // |zdot - i E[z] z|
    std::vector<double> defect_rhs;  // cubic+quadratic modulation source size
    std::vector<complexd> limit_series; // z(t) e^{-i theta(t)}

    void write_csv(const std::string& path) const;
};

// 2D real Newton on K_j(z) = <i(u - Q[z]), D_j Q[z]>; guess is the hint
// or (phi, u). Without a hint a second start at 1.2x the guess must land
// on the same root (uniqueness check).
ModulationState decompose(const ComplexField& u, const SpectralDecomposition& dec,
                          std::optional<complexd> hint = {});

ModulationPath track_modulation(const Trajectory& traj, const SpectralDecomposition& dec);

// K(z) eta = eta + c phi with the complex scalar c chosen so the mapped
// field satisfies both orthogonality conditions at z; defect is
// ||P_c(mapped) - P_c eta||.
struct ProjectionComparison {
    ComplexField mapped;
    double defect = 0.0;
};

ProjectionComparison projection_comparison(complexd z, const ComplexField& eta,
                                           const SpectralDecomposition& dec);

} // namespace nlslab
