#pragma once

#include <array>
#include <vector>

#include "nlslab/spectral.hpp"

namespace nlslab {

// Largest |z| at which the fixed-point construction is observed to stay
// contractive on the default grids.
constexpr double kBoundStateDeltaMax = 0.2;

// Small nonlinear bound state (H - E) Q = |Q|^2 Q with Q = z phi + q,
// q orthogonal to phi.
struct NonlinearBoundState {
    complexd z;
    ComplexField Q;
    ComplexField q; // Q - z phi
    double E = 0.0;
    double residual = 0.0;
    std::vector<double> residual_history;
};

NonlinearBoundState solve_nonlinear_bound_state(complexd z,
                                                const SpectralDecomposition& dec);

// Real-Jacobian of the family: derivatives in (Re z, Im z) by centered
// differences, plus the gauge-identity defect ||DQ.(iz) - iQ||.
struct BoundStateJacobian {
    complexd z;
    ComplexField Q;
    ComplexField D1Q, D2Q;
    std::array<double, 2> DE{};
    double gauge_defect = 0.0;
};

BoundStateJacobian bound_state_jacobian(complexd z, const SpectralDecomposition& dec);

// Secular correction profiles of the refined radiation decomposition:
// the coupled elliptic system with coefficients A = 2|Q|^2, B = Q^2,
// solved by Picard iteration with measured contraction.
struct RefinedProfiles {
    complexd z_inf;
    double E_inf = 0.0;
    ComplexField profile_a; // paired with a(t)
    ComplexField profile_b; // paired with conj(a)(t) e^{2i int E}
    ComplexField coef_A, coef_B;
    double contraction = 0.0; // worst measured step ratio
    double residual1 = 0.0, residual2 = 0.0;
};

RefinedProfiles solve_refined_profiles(complexd z_inf, const SpectralDecomposition& dec);

} // namespace nlslab
