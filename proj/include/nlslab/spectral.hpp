#pragma once

#include <optional>
#include <vector>

#include "nlslab/field.hpp"
#include "nlslab/jost.hpp"
#include "nlslab/potential.hpp"

namespace nlslab {

// Dense eigendecomposition of H = -d^2/dx^2 + V on the truncated line with
// Dirichlet ends (6th-order stencil).  Eigenvectors are grid-orthonormal:
// sum_j v_a(j) v_b(j) = delta_ab, so continuum-normalized functions are
// v / sqrt(dx).
class SpectralDecomposition {
  public:
    SpectralDecomposition(const Potential& V, const SpatialGrid& grid);

    const SpatialGrid& grid() const { return grid_; }
    int size() const { return grid_.n_points; }

    int n_bound() const { return n_bound_; }
    double eigenvalue(int a) const { return evals_[a]; }
    const std::vector<double>& eigenvalues() const { return evals_; }

    // unique negative eigenvalue / its L2-normalized eigenfunction
    double rho_squared() const;          // rho^2 = -E_bound > 0
    const ComplexField& ground_state() const { return phi_; }

    // projections onto the discrete / continuous spectral subspaces
    ComplexField project_discrete(const ComplexField& u) const;
    ComplexField project_continuous(const ComplexField& u) const;

    ComplexField apply_H(const ComplexField& u) const;
    // e^{iHt} u, optionally only modes with eigenvalue <= lambda_cut
    ComplexField propagate(const ComplexField& u, double t,
                           std::optional<double> lambda_cut = {}) const;
    // (H - E)^{-1} restricted to the continuous subspace; requires E away
    // from all retained continuum eigenvalues
    ComplexField resolvent_continuous(const ComplexField& u, double E) const;

    // coefficient-space access used by the time stepper
    std::vector<complexd> to_modes(const ComplexField& u, int n_modes) const;
    ComplexField from_modes(const std::vector<complexd>& c) const;
    int modes_below(double lambda_cut) const;

  private:
    SpatialGrid grid_;
    std::vector<double> evals_;
    std::vector<double> evecs_; // column-major, n x n
    std::vector<double> vdiag_;
    int n_bound_ = 0;
    ComplexField phi_;
};

// Distorted Fourier kernel K(x, k) built from Jost data: for k >= 0 it is
// T(k) psi_+(x, k) / sqrt(2 pi), for k < 0 it is T(-k) psi_-(x, -k) / sqrt(2 pi).
class DistortedTransform {
  public:
    DistortedTransform(const Potential& V, const SpatialGrid& grid,
                       const FrequencyGrid& kgrid, bool parallel = true);

    const SpatialGrid& grid() const { return grid_; }
    const FrequencyGrid& kgrid() const { return kgrid_; }
    const ScatteringData& scattering() const { return scat_; }
    const JostSolution& jost() const { return jost_; }

    complexd kernel(int j, int i) const { return kern_[(size_t)i * grid_.n_points + j]; }

    // u~(k) = int conj(K(x,k)) u(x) dx   and its adjoint inverse
    std::vector<complexd> forward(const ComplexField& u) const;
    ComplexField inverse(const std::vector<complexd>& ut) const;
    std::vector<complexd> forward_serial(const ComplexField& u) const;
    ComplexField inverse_serial(const std::vector<complexd>& ut) const;

    // e^{iHt} P_c u through the distorted transform (multiply by e^{ik^2 t})
    ComplexField propagate(const ComplexField& u, double t) const;

  private:
    SpatialGrid grid_;
    FrequencyGrid kgrid_;
    JostSolution jost_;
    ScatteringData scat_;
    std::vector<complexd> kern_; // column i = K(., k_i), length n per column
    bool parallel_ = true;
};

// Green's function route for (H - k^2)^{-1}: kernel f_+(x_>) f_-(x_<) / W
// from the Jost solutions at spectral parameter k (Im k >= 0; k = i kappa
// gives the resolvent below the continuous spectrum, k real gives the
// limiting boundary value R(k^2 + i0)).
struct ResolventGreen {
    SpatialGrid grid;
    complexd k;
    std::vector<complexd> m_plus, m_minus, dm_plus, dm_minus;
    complexd W;                 // Wronskian in the m variables
    double wronskian_variation; // relative spread of W over the inner 80%

    // G(x_j, x_l); exponentials evaluated on the coordinate difference so
    // nothing overflows for Im k > 0
    complexd kernel(int j, int l) const;
    // O(n) application by prefix sums (Gregory-corrected at the moving end)
    ComplexField apply(const ComplexField& f) const;
};

ResolventGreen resolvent_green(const Potential& V, const SpatialGrid& grid,
                               complexd k);

// Numerov shooting value of rho^2 on a refined grid (test oracle for the
// dense eigensolve).
double shoot_ground_state(const Potential& V, double half_width, int n_points);

} // namespace nlslab
