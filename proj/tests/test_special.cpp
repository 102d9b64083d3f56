#include <doctest.h>

#include <cmath>

#include "relfp/bessel.hpp"
#include "relfp/quadrature.hpp"

using namespace relfp;

TEST_SUITE("special") {

TEST_CASE("bessel_k against frozen references") {
    // Reference digits cross-checked against libstdc++'s cyl_bessel_k below.
    CHECK(bessel_k(0, 1.0) == doctest::Approx(0.42102443824070834).epsilon(1e-13));
    CHECK(bessel_k(1, 1.0) == doctest::Approx(0.60190723019723458).epsilon(1e-13));
    CHECK(bessel_k(2, 1.0) == doctest::Approx(1.6248388986351774).epsilon(1e-13));
}

TEST_CASE("bessel_k against the standard library over the working range") {
    for (double x : {0.1, 0.3, 0.7, 1.0, 2.0, 3.5, 5.0, 8.0}) {
        for (int n : {0, 1, 2}) {
            const double ref = std::cyl_bessel_k(static_cast<double>(n), x);
            CHECK(bessel_k(n, x) == doctest::Approx(ref).epsilon(1e-11));
        }
    }
}

TEST_CASE("bessel recurrence K2 = K0 + 2 K1 / x") {
    for (double x : {0.3, 0.6, 1.2, 2.4, 4.8}) {
        const double lhs = bessel_k(2, x);
        const double rhs = bessel_k(0, x) + 2.0 * bessel_k(1, x) / x;
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("bessel_k rejects nonpositive arguments") {
    CHECK_THROWS_AS(bessel_k(1, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(bessel_k(1, -2.0), std::invalid_argument);
}

TEST_CASE("adaptive quadrature on elementary integrals") {
    const double one = integrate_adaptive([](double x) { return 3.0 * x * x; }, 0.0, 1.0);
    CHECK(one == doctest::Approx(1.0).epsilon(1e-13));

    const double gauss = integrate_adaptive([](double x) { return std::exp(-x * x); }, -8.0, 8.0);
    CHECK(gauss == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-13));

    // Integrand with a sharp feature, forcing several bisections.
    const double peak =
        integrate_adaptive([](double x) { return 1.0 / (1e-4 + x * x); }, -1.0, 1.0);
    const double exact = 2.0 / 1e-2 * std::atan(1.0 / 1e-2);
    CHECK(peak == doctest::Approx(exact).epsilon(1e-11));
}

} // TEST_SUITE
