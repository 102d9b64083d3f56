#include <doctest.h>

#include <cmath>

#include "relfp/radial.hpp"

using namespace relfp;

TEST_SUITE("radial") {

TEST_CASE("poisson of the uniform unit ball matches the closed form") {
    // Grid chosen so the ball surface r = 1 falls on a cell face.
    RadialGrid g(512, 2.0);
    RadialField rho(g);
    for (int k = 0; k < g.n_r; ++k)
        if (g.r(k) < 1.0) rho.values[k] = 3.0 / (4.0 * M_PI);

    RadialField u = poisson_radial(rho);
    auto exact = [](double r) {
        return r <= 1.0 ? (3.0 - r * r) / (8.0 * M_PI) : 1.0 / (4.0 * M_PI * r);
    };
    double worst = 0.0;
    for (int k = 0; k < g.n_r; ++k)
        worst = std::max(worst, std::abs(u.values[k] - exact(g.r(k))));
    CHECK(worst < 1e-5);

    // O(dr^2) under refinement.
    RadialGrid g2(1024, 2.0);
    RadialField rho2(g2);
    for (int k = 0; k < g2.n_r; ++k)
        if (g2.r(k) < 1.0) rho2.values[k] = 3.0 / (4.0 * M_PI);
    RadialField u2 = poisson_radial(rho2);
    double worst2 = 0.0;
    for (int k = 0; k < g2.n_r; ++k)
        worst2 = std::max(worst2, std::abs(u2.values[k] - exact(g2.r(k))));
    CHECK(std::log2(worst / worst2) > 1.7);

    // Continuity at the surface: value at r = 1 is 1/(4 pi).
    const int k1 = 255; // cell just inside r = 1
    CHECK(u.values[k1] == doctest::Approx(exact(g.r(k1))).epsilon(1e-4));
}

TEST_CASE("poisson of zero is zero") {
    RadialGrid g(64, 5.0);
    RadialField zero(g);
    CHECK(poisson_radial(zero).values.norm() == 0.0);
}

TEST_CASE("far field reproduces the total charge") {
    RadialGrid g(2048, 20.0);
    RadialField rho(g);
    for (int k = 0; k < g.n_r; ++k) rho.values[k] = std::exp(-g.r(k) * g.r(k));
    const double q_total = radial_integral(rho);
    RadialField u = poisson_radial(rho);
    // r U(r) -> Q/(4 pi) on the outer decade.
    const int k_far = g.n_r - 1;
    CHECK(g.r(k_far) * u.values[k_far] ==
          doctest::Approx(q_total / (4.0 * M_PI)).epsilon(1e-6));
    // Monotone 1/r decay on the outer decade.
    for (int k = g.n_r - 200; k < g.n_r; ++k)
        CHECK(g.r(k) * u.values[k] == doctest::Approx(q_total / (4.0 * M_PI)).epsilon(1e-5));
}

TEST_CASE("discrete laplacian residual is small in weighted L2 for smooth sources") {
    RadialGrid g(8192, 10.0);
    RadialField rho(g);
    for (int k = 0; k < g.n_r; ++k) rho.values[k] = std::exp(-g.r(k) * g.r(k));
    RadialField u = poisson_radial(rho);
    Eigen::VectorXd res = radial_laplacian_residual(u, rho);
    CHECK(weighted_l2(res, g) < 1e-6);
}

TEST_CASE("grid validation") {
    CHECK_THROWS_AS(RadialGrid(4, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(RadialGrid(64, -1.0), std::invalid_argument);
}

} // TEST_SUITE
