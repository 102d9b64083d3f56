#include <doctest.h>

#include <random>

#include "relfp/kinematics.hpp"
#include "relfp/quadrature.hpp"

using namespace relfp;

namespace {
Vec vec3(double a, double b, double c) {
    Vec v(3);
    v << a, b, c;
    return v;
}
} // namespace

TEST_SUITE("kinematics") {

TEST_CASE("energy closed forms") {
    CHECK(energy(Vec::Zero(3)) == doctest::Approx(1.0));
    CHECK(energy(vec3(1, 0, 0)) == doctest::Approx(std::sqrt(2.0)));
    CHECK(energy(vec3(3, 4, 0)) == doctest::Approx(std::sqrt(26.0)));
    CHECK(energy(Vec::Zero(1)) == 1.0);
    CHECK_THROWS_AS(energy(Vec::Zero(4)), std::invalid_argument);
}

TEST_CASE("rel_velocity stays inside the unit ball") {
    CHECK(rel_velocity(Vec::Zero(2)).norm() == 0.0);
    CHECK(rel_velocity(vec3(1, 0, 0))[0] == doctest::Approx(0.7071067811865475));
    Vec big = vec3(1e3, 0, 0);
    const double speed = rel_velocity(big).norm();
    CHECK(speed < 1.0);
    CHECK(1.0 - speed < 1e-6);
}

TEST_CASE("diffusion matrix closed forms and flux identity") {
    Mat D0 = diffusion_matrix(Vec::Zero(3)).D;
    CHECK((D0 - Mat::Identity(3, 3)).norm() < 1e-15);

    Mat D1 = diffusion_matrix(vec3(1, 0, 0)).D;
    CHECK(D1(0, 0) == doctest::Approx(std::sqrt(2.0)));
    CHECK(D1(1, 1) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(D1(2, 2) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(std::abs(D1(0, 1)) < 1e-15);

    // D(p) \hat p = p, the friction/diffusion balance behind the Juttner
    // equilibrium.
    std::mt19937_64 rng(7);
    std::normal_distribution<double> gauss(0.0, 2.0);
    for (int trial = 0; trial < 100; ++trial) {
        Vec p = vec3(gauss(rng), gauss(rng), gauss(rng));
        Vec lhs = diffusion_matrix(p).D * rel_velocity(p);
        CHECK((lhs - p).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("diffusion matrix eigenstructure") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> gauss(0.0, 1.5);
    for (int trial = 0; trial < 20; ++trial) {
        Vec p = vec3(gauss(rng), gauss(rng), gauss(rng));
        const double e = energy(p);
        Eigen::SelfAdjointEigenSolver<Mat> es(diffusion_matrix(p).D);
        // Eigenvalues sorted ascending: (1+|p|^2)^(-1/2) twice, then p0.
        CHECK(es.eigenvalues()[0] == doctest::Approx(1.0 / e).epsilon(1e-12));
        CHECK(es.eigenvalues()[1] == doctest::Approx(1.0 / e).epsilon(1e-12));
        CHECK(es.eigenvalues()[2] == doctest::Approx(e).epsilon(1e-12));
        Vec top = es.eigenvectors().col(2);
        CHECK(std::abs(std::abs(top.dot(p.normalized())) - 1.0) < 1e-10);
    }
}

TEST_CASE("hyperbolic metric closed forms") {
    auto m0 = hyperbolic_metric(Vec::Zero(3));
    CHECK((m0.h - Mat::Identity(3, 3)).norm() < 1e-15);
    CHECK(m0.det_h == doctest::Approx(1.0));

    auto m1 = hyperbolic_metric(vec3(1, 0, 0));
    CHECK(m1.h(0, 0) == doctest::Approx(0.5));
    CHECK(m1.h(1, 1) == doctest::Approx(1.0));
    CHECK(m1.det_h == doctest::Approx(0.5));
    CHECK(m1.h_inv(0, 0) == doctest::Approx(2.0));
}

TEST_CASE("metric properties: inverse, determinant, diffusion identity") {
    std::mt19937_64 rng(13);
    std::normal_distribution<double> gauss(0.0, 2.0);
    for (int trial = 0; trial < 100; ++trial) {
        Vec p = vec3(gauss(rng), gauss(rng), gauss(rng));
        auto m = hyperbolic_metric(p);
        CHECK((m.h * m.h_inv - Mat::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(m.det_h == doctest::Approx(m.h.determinant()).epsilon(1e-10));
        // sqrt(det h) h^-1 = D componentwise.
        Mat lhs = std::sqrt(m.det_h) * m.h_inv;
        Mat D = diffusion_matrix(p).D;
        CHECK((lhs - D).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("juttner values") {
    CHECK(juttner(Vec::Zero(3), 1.0) == doctest::Approx(std::exp(-1.0)));
    CHECK_THROWS_AS(juttner(Vec::Zero(3), 0.0), std::invalid_argument);
}

TEST_CASE("juttner integrals reduce to modified Bessel values") {
    // 3d: 4 pi K2(1); 1d: 2 K1(1). Quadrature of the juttner weight itself
    // against the frozen Bessel references.
    const double three_d = 4.0 * M_PI *
                           integrate_adaptive(
                               [](double r) {
                                   Vec p(3);
                                   p << r, 0.0, 0.0;
                                   return r * r * juttner(p, 1.0);
                               },
                               0.0, 80.0, 1e-13);
    CHECK(three_d == doctest::Approx(4.0 * M_PI * 1.6248388986351774).epsilon(1e-10));

    const double one_d = 2.0 * integrate_adaptive(
                                   [](double r) {
                                       Vec p(1);
                                       p << r;
                                       return juttner(p, 1.0);
                                   },
                                   0.0, 80.0, 1e-13);
    CHECK(one_d == doctest::Approx(1.2038144603944692).epsilon(1e-10));
}

TEST_CASE("lorentz boost special values") {
    // u = 0 is the identity.
    PhaseEvent ev{0.3, vec3(1, 2, 3), vec3(-1, 0.5, 2)};
    auto same = lorentz_boost(Vec::Zero(3), ev);
    CHECK(same.t == doctest::Approx(ev.t));
    CHECK((same.x - ev.x).norm() < 1e-15);
    CHECK((same.p - ev.p).norm() < 1e-15);

    // Boost of a rest particle.
    PhaseEvent rest{0.0, Vec::Zero(3), Vec::Zero(3)};
    auto boosted = lorentz_boost(vec3(0.5, 0, 0), rest);
    CHECK(boosted.p[0] == doctest::Approx(-0.5));
    CHECK(energy(boosted.p) == doctest::Approx(std::sqrt(1.25)));
}

TEST_CASE("lorentz boost mass shell and four-momentum time component") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> uni(-2.0, 2.0);
    for (int trial = 0; trial < 100; ++trial) {
        Vec u = vec3(uni(rng), uni(rng), uni(rng));
        Vec p = vec3(uni(rng), uni(rng), uni(rng));
        PhaseEvent ev{uni(rng), vec3(uni(rng), uni(rng), uni(rng)), p};
        auto b = lorentz_boost(u, ev);
        const double e_tilde = energy(b.p);
        CHECK(std::abs(e_tilde * e_tilde - b.p.squaredNorm() - 1.0) < 1e-12);
        const double u0 = std::sqrt(1.0 + u.squaredNorm());
        CHECK(e_tilde == doctest::Approx(u0 * energy(p) - u.dot(p)).epsilon(1e-12));
    }
}

TEST_CASE("lorentz boost composition with the inverse") {
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        Vec dir = vec3(uni(rng), uni(rng), uni(rng));
        if (dir.norm() < 1e-6) continue;
        Vec u = dir / dir.norm() * std::abs(uni(rng)) * 2.0;
        PhaseEvent ev{uni(rng), vec3(uni(rng), uni(rng), uni(rng)),
                      vec3(uni(rng), uni(rng), uni(rng))};
        auto round_trip = lorentz_boost(-u, lorentz_boost(u, ev));
        CHECK(std::abs(round_trip.t - ev.t) < 1e-10);
        CHECK((round_trip.x - ev.x).cwiseAbs().maxCoeff() < 1e-10);
        CHECK((round_trip.p - ev.p).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("lorentz boost small-u series branch") {
    Vec u = vec3(5e-5, -3e-5, 1e-5);
    PhaseEvent ev{1.0, vec3(0.3, -0.2, 0.1), vec3(1.0, 2.0, -0.5)};
    auto round_trip = lorentz_boost(-u, lorentz_boost(u, ev));
    CHECK((round_trip.p - ev.p).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("galilean boost") {
    Vec u(1);
    u << 1.0;
    Vec x(1), p(1);
    x << 2.0;
    p << 3.0;
    auto b = galilean_boost(u, PhaseEvent{1.0, x, p});
    CHECK(b.x[0] == doctest::Approx(1.0));
    CHECK(b.p[0] == doctest::Approx(2.0));
    CHECK(b.t == doctest::Approx(1.0));

    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> uni(-3.0, 3.0);
    for (int trial = 0; trial < 20; ++trial) {
        Vec w = vec3(uni(rng), uni(rng), uni(rng));
        PhaseEvent ev{uni(rng), vec3(uni(rng), uni(rng), uni(rng)),
                      vec3(uni(rng), uni(rng), uni(rng))};
        auto round_trip = galilean_boost(-w, galilean_boost(w, ev));
        CHECK((round_trip.x - ev.x).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((round_trip.p - ev.p).cwiseAbs().maxCoeff() < 1e-12);
    }
}

} // TEST_SUITE
