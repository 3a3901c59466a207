#pragma once

#include <vector>

#include "nlslab/field.hpp"
#include "nlslab/potential.hpp"

namespace nlslab {

// Potential sampled on an oversampled copy of a target grid. The Jost
// marching runs on the fine nodes and writes out every `stride`-th one.
struct FineSampling {
    SpatialGrid target;
    int stride = 1;
    double h = 0.0;     // fine spacing = target.spacing / stride
    int n_fine = 0;     // target.n_points * stride
    std::vector<double> V;

    double y(int l) const { return -target.half_width + l * h; }
};

FineSampling make_fine_sampling(const Potential& V, const SpatialGrid& grid,
                                double k_max);

// One k-column of normalized Jost data on the target grid, plus the
// fine-grid scattering integrals evaluated during the march.
struct JostColumn {
    std::vector<complexd> m_plus, m_minus;   // m±(x, k)
    std::vector<complexd> dm_plus, dm_minus; // d/dx m±(x, k)
    complexd int_V_m_plus{};   // \int V m+ dx
    complexd int_V_m_minus{};  // \int V m- dx
    complexd int_R_plus{};     // \int e^{-2ikx} V m- dx
    complexd int_R_minus{};    // \int e^{+2ikx} V m+ dx
};

// Single inward marching pass of the Volterra equation (Gregory-corrected
// trapezoid, one pass per side). Works for complex k with Im k >= 0.
JostColumn jost_column(const FineSampling& fv, complexd k);

struct JostSolution {
    SpatialGrid grid;
    FrequencyGrid kgrid;
    std::vector<JostColumn> columns; // one per k node

    const JostColumn& at(int i) const { return columns[i]; }
};

// Marches all k-columns. The parallel driver fans the independent columns
// out with OpenMP; the serial one is the reference used by the tests and
// the benchmark.
JostSolution solve_jost(const Potential& V, const SpatialGrid& grid,
                        const FrequencyGrid& kgrid);
JostSolution solve_jost_serial(const Potential& V, const SpatialGrid& grid,
                               const FrequencyGrid& kgrid);

struct ScatteringData {
    FrequencyGrid kgrid;
    std::vector<complexd> T, R_plus, R_minus;
    complexd genericity_value{};
    complexd alpha_slope{}; // small-k slope of T fitted on the 5 smallest k>0 nodes
    double unitarity_defect = 0.0; // max_k | |T|^2+|R|^2-1 |
    double cross_defect = 0.0;     // max_k | T conj(R-) + conj(T) R+ |
};

ScatteringData compute_scattering(const JostSolution& jost, const Potential& V,
                                  const SpatialGrid& grid);

// \int V(x) m±(x,0) dx, both signs; is_generic = |value| > 1e-6.
struct GenericityResult {
    complexd value;
    bool is_generic;
};
GenericityResult check_generic(const Potential& V, const SpatialGrid& grid);

// sup over the inner 80% of |m'' + 2ik m' - V m| for column i (the
// ODE residual of psi± written in the slowly varying variable).
double jost_ode_residual(const JostSolution& jost, const Potential& V, int column,
                         bool plus_side);

} // namespace nlslab
