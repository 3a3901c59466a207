#include "doctest.h"

#include <cmath>

#include "nlslab/boundstate.hpp"

using namespace nlslab;

namespace {

const SpectralDecomposition& dec() {
    static SpectralDecomposition d(Potential::gaussian_well(1.0, 1.0),
                                   SpatialGrid(30.0, 1024));
    return d;
}

} // namespace

TEST_CASE("z = 0 gives the trivial branch") {
    auto bs = solve_nonlinear_bound_state(complexd(0.0), dec());
    CHECK(l2_norm(bs.Q) == 0.0);
    CHECK(bs.E == doctest::Approx(-dec().rho_squared()).epsilon(1e-14));
}

TEST_CASE("bound-state invariants at z = 0.1") {
    auto bs = solve_nonlinear_bound_state(complexd(0.1), dec());
    // defining equation
    ComplexField N(bs.Q.grid);
    for (int j = 0; j < N.size(); ++j) N[j] = std::norm(bs.Q[j]) * bs.Q[j];
    CHECK(l2_norm(dec().apply_H(bs.Q) - complexd(bs.E) * bs.Q - N) < 1e-10);
    // q orthogonal to phi, and Q = z phi + q
    CHECK(std::abs(reduced_inner(dec().ground_state(), bs.q)) < 1e-12);
    CHECK(l2_norm(bs.Q - (bs.z * dec().ground_state() + bs.q)) < 1e-13);
    // eigenvalue close to linear one and below it
    CHECK(bs.E < -dec().rho_squared());
    CHECK(std::abs(bs.E + dec().rho_squared()) < 0.05);
    // residual monotone over the final stretch of the iteration
    const auto& h = bs.residual_history;
    REQUIRE(h.size() >= 2);
    for (size_t i = h.size() > 10 ? h.size() - 10 : 1; i < h.size(); ++i)
        CHECK(h[i] <= h[i - 1] * (1.0 + 1e-9));
}

TEST_CASE("gauge covariance to roundoff") {
    complexd phase = std::exp(complexd(0.0, M_PI / 3.0));
    auto a = solve_nonlinear_bound_state(0.05 * phase, dec());
    auto b = solve_nonlinear_bound_state(complexd(0.05), dec());
    CHECK(l2_norm(a.Q - phase * b.Q) < 1e-12);
    CHECK(a.E == doctest::Approx(b.E).epsilon(1e-13));
}

TEST_CASE("measured smallness orders of q and E + rho^2") {
    double nq[3], ne[3];
    double r = 0.1;
    for (int i = 0; i < 3; ++i, r /= 2) {
        auto bs = solve_nonlinear_bound_state(complexd(r), dec());
        nq[i] = l2_norm(bs.q);
        ne[i] = std::abs(bs.E + dec().rho_squared());
    }
    // cubic for q, quadratic for the eigenvalue shift
    for (int i = 0; i < 2; ++i) {
        double oq = std::log2(nq[i] / nq[i + 1]);
        double oe = std::log2(ne[i] / ne[i + 1]);
        CHECK(oq > 2.6);
        CHECK(oq < 3.4);
        CHECK(oe > 1.7);
        CHECK(oe < 2.3);
    }
}

TEST_CASE("exponential decay of Q on the outer half") {
    auto bs = solve_nonlinear_bound_state(complexd(0.1), dec());
    double rho = std::sqrt(dec().rho_squared());
    double C = 0.0;
    const auto& g = bs.Q.grid;
    for (int j = 0; j < g.n_points; ++j) {
        if (std::abs(g.x(j)) < g.half_width / 2) continue;
        C = std::max(C, std::abs(bs.Q[j]) * std::exp(0.9 * rho * std::abs(g.x(j))));
    }
    CHECK(C < 10.0);
    CHECK(std::abs(bs.Q[0]) < 1e-6);
}

TEST_CASE("out-of-regime z rejected") {
    CHECK_THROWS_AS(solve_nonlinear_bound_state(complexd(0.25), dec()), regime_error);
    CHECK_NOTHROW(solve_nonlinear_bound_state(complexd(0.2), dec()));
}

TEST_CASE("jacobian small-z limit is (phi, i phi)") {
    auto J = bound_state_jacobian(complexd(0.0), dec());
    CHECK(l2_norm(J.D1Q - dec().ground_state()) < 1e-4);
    CHECK(l2_norm(J.D2Q - complexd(0.0, 1.0) * dec().ground_state()) < 1e-4);
}

TEST_CASE("jacobian gauge identity and radial E dependence") {
    auto J = bound_state_jacobian(complexd(0.1), dec());
    CHECK(J.gauge_defect < 1e-6);

    complexd z = 0.1 * std::exp(complexd(0.0, M_PI / 4.0));
    auto Jr = bound_state_jacobian(z, dec());
    CHECK(Jr.gauge_defect < 1e-6);
    // E depends on |z| only: gradient orthogonal to the angular direction
    double ang = Jr.DE[0] * (-z.imag() / std::abs(z)) + Jr.DE[1] * (z.real() / std::abs(z));
    CHECK(std::abs(ang) < 1e-6);
    // and it does move radially
    double rad = Jr.DE[0] * (z.real() / std::abs(z)) + Jr.DE[1] * (z.imag() / std::abs(z));
    CHECK(std::abs(rad) > 1e-3);
}

TEST_CASE("refined profiles: trivial at z = 0, small and consistent at z = 0.05") {
    auto p0 = solve_refined_profiles(complexd(0.0), dec());
    CHECK(l2_norm(p0.profile_a) == 0.0);
    CHECK(l2_norm(p0.profile_b) == 0.0);

    auto p = solve_refined_profiles(complexd(0.05), dec());
    CHECK(p.contraction < 0.5);
    CHECK(p.residual1 < 1e-8);
    CHECK(p.residual2 < 1e-8);
    // live in the range of P_c
    CHECK(l2_norm(dec().project_continuous(p.profile_a) - p.profile_a) < 1e-10);
    CHECK(l2_norm(dec().project_continuous(p.profile_b) - p.profile_b) < 1e-10);
    // operator shift inequality
    CHECK(-dec().rho_squared() - 2.0 * p.E_inf >= dec().rho_squared() - 1e-6);

    // profiles scale like |z|^2 (coefficients A, B are quadratic)
    auto ph = solve_refined_profiles(complexd(0.025), dec());
    double ra = l2_norm(p.profile_a) / l2_norm(ph.profile_a);
    double rb = l2_norm(p.profile_b) / l2_norm(ph.profile_b);
    CHECK(ra > 3.0);
    CHECK(ra < 5.0);
    CHECK(rb > 3.0);
    CHECK(rb < 5.0);
}
