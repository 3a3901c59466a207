#include "doctest.h"

#include <cmath>

#include "nlslab/jost.hpp"

using namespace nlslab;

// |∫ V m(·,0) dx| for the default gaussian well, frozen from a refined run
// (n = 2048 and 4096 on L = 40 agree to 12 digits)
static constexpr double GENERIC_GOLDEN = 0.787947490215;

TEST_CASE("zero potential: m identically 1, trivial scattering") {
    Potential V = Potential::gaussian_well(0.0, 1.0);
    SpatialGrid g(20.0, 400);
    FrequencyGrid kg(4.0, 32);
    JostSolution js = solve_jost(V, g, kg);
    for (int i = 0; i < kg.m_points; ++i) {
        for (int j = 0; j < g.n_points; ++j) {
            CHECK(std::abs(js.at(i).m_plus[j] - 1.0) < 1e-14);
            CHECK(std::abs(js.at(i).m_minus[j] - 1.0) < 1e-14);
            CHECK(std::abs(js.at(i).dm_plus[j]) < 1e-14);
            CHECK(std::abs(js.at(i).dm_minus[j]) < 1e-14);
        }
    }
    ScatteringData sd = compute_scattering(js, V, g);
    for (int i = 0; i < kg.m_points; ++i) {
        CHECK(std::abs(sd.T[i] - 1.0) < 1e-14);
        CHECK(std::abs(sd.R_plus[i]) < 1e-14);
        CHECK(std::abs(sd.R_minus[i]) < 1e-14);
    }
    GenericityResult gr = check_generic(V, g);
    CHECK(std::abs(gr.value) < 1e-14);
    CHECK(!gr.is_generic);
}

TEST_CASE("reflectionless sech^2 well matches the closed form") {
    // V = -2 sech^2 x: m+(x,k) = (k + i tanh x)/(k + i), T = (k+i)/(k-i), R = 0
    // (verified by substituting psi = e^{ikx} m into -psi'' + V psi = k^2 psi)
    Potential V = Potential::sech2(2.0, 1.0);
    SpatialGrid g(30.0, 600);
    FrequencyGrid kg(8.0, 64);
    JostSolution js = solve_jost(V, g, kg);
    double sup = 0.0;
    for (int i = 0; i < kg.m_points; ++i) {
        complexd k(kg.k(i), 0.0);
        for (int j = 0; j < g.n_points; ++j) {
            complexd exact =
                (k + complexd(0.0, 1.0) * std::tanh(g.x(j))) / (k + complexd(0.0, 1.0));
            sup = std::max(sup, std::abs(js.at(i).m_plus[j] - exact));
            // V is even, so m-(x,k) = m+(-x,k); closed form with x -> -x
            complexd exact_m =
                (k - complexd(0.0, 1.0) * std::tanh(g.x(j))) / (k + complexd(0.0, 1.0));
            sup = std::max(sup, std::abs(js.at(i).m_minus[j] - exact_m));
        }
    }
    CHECK(sup < 1e-6);

    ScatteringData sd = compute_scattering(js, V, g);
    for (int i = 0; i < kg.m_points; ++i) {
        complexd k(kg.k(i), 0.0);
        complexd Texact = (k + complexd(0.0, 1.0)) / (k - complexd(0.0, 1.0));
        CHECK(std::abs(sd.T[i] - Texact) < 1e-6);
        CHECK(std::abs(sd.R_plus[i]) < 1e-6);
        CHECK(std::abs(sd.R_minus[i]) < 1e-6);
        CHECK(std::abs(std::abs(sd.T[i]) - 1.0) < 1e-6);
    }
    CHECK(sd.unitarity_defect < 1e-6);

    // resonant reflectionless case: |T(0)| = 1, so genericity fails
    GenericityResult gr = check_generic(V, g);
    CHECK(!gr.is_generic);
}

TEST_CASE("gaussian well scattering identities and low-k behavior") {
    Potential V = Potential::gaussian_well(1.0, 1.0);
    SpatialGrid g(40.0, 1024);
    FrequencyGrid kg(8.0, 128);
    JostSolution js = solve_jost(V, g, kg);
    ScatteringData sd = compute_scattering(js, V, g);

    CHECK(sd.unitarity_defect < 1e-6);
    CHECK(sd.cross_defect < 1e-6);

    GenericityResult gr = check_generic(V, g);
    CHECK(gr.is_generic);
    // magnitude pinned from an independent high-resolution run of the
    // k = 0 Volterra integral
    CHECK(std::abs(gr.value) == doctest::Approx(GENERIC_GOLDEN).epsilon(1e-6));

    // generic potential: T -> 0 and R -> -1 as k -> 0
    int i0 = kg.m_points / 2; // smallest positive k
    CHECK(std::abs(sd.T[i0]) < 0.2);
    CHECK(std::abs(sd.R_plus[i0] + 1.0) < 0.2);
    CHECK(std::abs(sd.R_minus[i0] + 1.0) < 0.2);
    // but T at moderate k is order one
    CHECK(std::abs(sd.T[kg.m_points - 1]) > 0.9);

}

TEST_CASE("small-k slope of T on the default frequency resolution") {
    Potential V = Potential::gaussian_well(1.0, 1.0);
    SpatialGrid g(30.0, 512);
    FrequencyGrid kg(8.0, 512);
    ScatteringData sd = compute_scattering(solve_jost(V, g, kg), V, g);
    // T ~ alpha k: eliminate the k^2 term from the two smallest positive
    // nodes (k2 = 3 k1 on this grid) and compare with the fitted slope
    int i0 = kg.m_points / 2;
    complexd alpha_id = (9.0 * sd.T[i0] - sd.T[i0 + 1]) / (6.0 * kg.k(i0));
    CHECK(std::abs(sd.alpha_slope - alpha_id) < 0.1 * std::abs(alpha_id));
    CHECK(std::abs(sd.alpha_slope) > 0.1);
}

TEST_CASE("ODE residual of the marched solution is small") {
    Potential V = Potential::gaussian_well(1.0, 1.0);
    SpatialGrid g(20.0, 2000);
    FrequencyGrid kg(8.0, 16);
    JostSolution js = solve_jost(V, g, kg);
    for (int i : {0, 8, 12, 15}) {
        CHECK(jost_ode_residual(js, V, i, true) < 1e-6);
        CHECK(jost_ode_residual(js, V, i, false) < 1e-6);
    }
}

TEST_CASE("m - 1 obeys the weighted bound at k = 5") {
    Potential V = Potential::gaussian_well(1.0, 1.0);
    SpatialGrid g(30.0, 600);
    FrequencyGrid kg(8.0, 64);
    JostSolution js = solve_jost(V, g, kg);
    // nearest column to k = 5
    int best = 0;
    for (int i = 0; i < kg.m_points; ++i)
        if (std::abs(kg.k(i) - 5.0) < std::abs(kg.k(best) - 5.0)) best = i;
    double kv = kg.k(best);
    // W_+^1(x) = int_x^inf <y> |V(y)| dy by fine trapezoid
    auto w1 = [&](double x) {
        double acc = 0.0, h = 1e-3;
        for (double y = 30.0; y > x; y -= h)
            acc += h * std::sqrt(1.0 + y * y) * std::abs(V(y));
        return acc;
    };
    double C = 0.0;
    for (int j = 0; j < g.n_points; ++j) {
        if (g.x(j) < -1.0) continue;
        double bound = w1(g.x(j)) / std::sqrt(1.0 + kv * kv);
        if (bound < 1e-14) continue;
        C = std::max(C, std::abs(js.at(best).m_plus[j] - 1.0) / bound);
    }
    CHECK(C > 0.0);
    CHECK(C < 10.0);
}

TEST_CASE("parallel and serial drivers agree exactly") {
    Potential V = Potential::gaussian_well(1.0, 1.0);
    SpatialGrid g(20.0, 256);
    FrequencyGrid kg(4.0, 16);
    JostSolution a = solve_jost(V, g, kg);
    JostSolution b = solve_jost_serial(V, g, kg);
    for (int i = 0; i < kg.m_points; ++i)
        for (int j = 0; j < g.n_points; ++j) {
            CHECK(a.at(i).m_plus[j] == b.at(i).m_plus[j]);
            CHECK(a.at(i).m_minus[j] == b.at(i).m_minus[j]);
        }
}

TEST_CASE("closed-form error drops like the 4th power in the marching step") {
    Potential V = Potential::sech2(2.0, 1.0);
    SpatialGrid g(30.0, 300);
    complexd k(2.0, 0.0);
    // the fine marching step comes from the requested band limit, so
    // doubling it halves h; quartic order means ~16x error drop
    auto sup_err = [&](double k_max) {
        FineSampling fv = make_fine_sampling(V, g, k_max);
        JostColumn col = jost_column(fv, k);
        double sup = 0.0;
        for (int j = 0; j < g.n_points; ++j) {
            complexd exact = (k + complexd(0.0, 1.0) * std::tanh(g.x(j))) /
                             (k + complexd(0.0, 1.0));
            sup = std::max(sup, std::abs(col.m_plus[j] - exact));
        }
        return sup;
    };
    double e1 = sup_err(2.0), e2 = sup_err(4.0);
    CHECK(e1 < 1e-6);
    CHECK(e2 < e1 / 10.0);
}

TEST_CASE("guards: blow-up and non-decayed potential") {
    SpatialGrid g(20.0, 256);
    FrequencyGrid kg(2.0, 8);
    CHECK_THROWS_AS(solve_jost(Potential::gaussian_well(1e8, 1.0), g, kg),
                    instability_error);
    std::vector<double> ones(g.n_points, 1.0);
    CHECK_THROWS_AS(solve_jost(Potential::tabulated(g, ones), g, kg),
                    std::invalid_argument);
}
