#include <doctest.h>

#include <cmath>
#include <random>

#include "relfp/diagnostics.hpp"
#include "relfp/fp_solver.hpp"

using namespace relfp;

namespace {

double grid_theta(const PhaseGrid& g, const ExternalPotential& V) {
    double theta = 0.0;
    for (int i = 0; i < g.n_x; ++i)
        for (int j = 0; j < g.n_p; ++j)
            theta += std::exp(-V.value(g.x_center(i))) * std::exp(-energy1d(g.p_center(j)));
    return theta * g.cell_measure();
}

DistributionField random_mass_matched(const DistributionField& m, std::mt19937_64& rng,
                                      double amplitude) {
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    DistributionField f = m;
    for (int i = 0; i < f.grid.n_x; ++i)
        for (int j = 0; j < f.grid.n_p; ++j)
            f.values(j, i) *= 1.0 + amplitude * uni(rng);
    f.values *= mass(m) / mass(f);
    return f;
}

} // namespace

TEST_SUITE("diagnostics") {

TEST_CASE("free energy of the steady state equals M log(M/Theta)") {
    PhaseGrid g(64, 64, -9.0, 9.0, 8.0);
    auto V = ExternalPotential::harmonic();
    const double theta = grid_theta(g, V);
    for (double M : {0.5, 1.0, 3.0}) {
        DistributionField m = steady_state_linear(M, V, g);
        CHECK(free_energy(m, V) == doctest::Approx(M * std::log(M / theta)).epsilon(1e-12));
    }
}

TEST_CASE("free energy scaling identities") {
    PhaseGrid g(48, 48, -8.0, 8.0, 8.0);
    auto V = ExternalPotential::harmonic();
    const double M = 1.0;
    DistributionField m = steady_state_linear(M, V, g);
    DistributionField two_m = m;
    two_m.values *= 2.0;
    // Doubling the field doubles Q and adds 2M log 2.
    CHECK(free_energy(two_m, V) ==
          doctest::Approx(2.0 * free_energy(m, V) + 2.0 * M * std::log(2.0)).epsilon(1e-12));
    // 2 m_M is exactly the minimizer at mass 2M.
    DistributionField m2 = steady_state_linear(2.0 * M, V, g);
    CHECK(free_energy(two_m, V) == doctest::Approx(free_energy(m2, V)).epsilon(1e-12));
}

TEST_CASE("steady state minimizes the free energy at fixed mass") {
    PhaseGrid g(48, 48, -8.0, 8.0, 8.0);
    auto V = ExternalPotential::harmonic();
    DistributionField m = steady_state_linear(1.0, V, g);
    const double q_min = free_energy(m, V);
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 50; ++trial) {
        DistributionField f = random_mass_matched(m, rng, 0.7);
        CHECK(free_energy(f, V) > q_min);
    }
}

TEST_CASE("entropy dissipation vanishes on Juttner profiles") {
    PhaseGrid g(32, 64, -8.0, 8.0, 8.0);
    auto V = ExternalPotential::harmonic();
    DistributionField m = steady_state_linear(1.0, V, g);
    CHECK(entropy_dissipation(m) < 1e-20);

    // c J(p) g(x) for a non-equilibrium spatial profile is still flat in p.
    DistributionField f(g);
    for (int i = 0; i < g.n_x; ++i)
        for (int j = 0; j < g.n_p; ++j)
            f.values(j, i) = 0.7 * std::exp(-energy1d(g.p_center(j))) *
                             (2.0 + std::sin(0.5 * g.x_center(i)));
    CHECK(entropy_dissipation(f) < 1e-20);

    DistributionField shifted(g);
    for (int i = 0; i < g.n_x; ++i)
        for (int j = 0; j < g.n_p; ++j)
            shifted.values(j, i) = std::exp(-energy1d(g.p_center(j) - 1.0));
    CHECK(entropy_dissipation(shifted) > 1e-3);
}

TEST_CASE("entropy identity holds along a dissipative run") {
    // Shifted Juttner relaxing under the full equation; the decay of Q must
    // match the time-integrated dissipation within 5 percent.
    PhaseGrid g(128, 128, -9.0, 9.0, 8.0);
    auto V = ExternalPotential::harmonic();
    DistributionField f(g);
    for (int i = 0; i < g.n_x; ++i)
        for (int j = 0; j < g.n_p; ++j)
            f.values(j, i) = std::exp(-V.value(g.x_center(i))) *
                             std::exp(-energy1d(g.p_center(j) - 2.0));
    f.values *= 1.0 / mass(f);

    SolverConfig cfg;
    cfg.dt = 1e-3;
    Solver solver(g, V, cfg);
    SolverState st{f, 0.0, 0, nullptr};
    const double q0 = free_energy(st.f, V);
    double diss_prev = entropy_dissipation(st.f);
    double diss_int = 0.0;
    double q_prev = q0;
    int q_increases = 0;
    for (int n = 0; n < 1000; ++n) {
        solver.step(st);
        const double d = entropy_dissipation(st.f);
        diss_int += 0.5 * (diss_prev + d) * cfg.dt;
        diss_prev = d;
        const double q = free_energy(st.f, V);
        if (q > q_prev + 1e-12 * std::abs(q_prev)) ++q_increases;
        q_prev = q;
    }
    const double residual = (free_energy(st.f, V) - q0) + diss_int;
    CHECK(std::abs(residual) <= 0.05 * diss_int);
    CHECK(q_increases == 0); // free energy monotone along the whole run
}

TEST_CASE("entropy gap lower bound") {
    PhaseGrid g(48, 48, -8.0, 8.0, 8.0);
    auto V = ExternalPotential::harmonic();
    DistributionField m = steady_state_linear(1.0, V, g);

    auto [lhs0, rhs0] = entropy_gap_lower_bound(m, m, V);
    CHECK(std::abs(lhs0) < 1e-13);
    CHECK(std::abs(rhs0) < 1e-13);

    // Renormalized sine-modulated profile.
    DistributionField f = m;
    for (int i = 0; i < g.n_x; ++i)
        for (int j = 0; j < g.n_p; ++j)
            f.values(j, i) *= 1.0 + 0.5 * std::sin(g.x_center(i) + 0.3 * g.p_center(j));
    f.values *= mass(m) / mass(f);
    auto [lhs1, rhs1] = entropy_gap_lower_bound(f, m, V);
    CHECK(lhs1 >= rhs1);
    CHECK(rhs1 > 0.0);

    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 50; ++trial) {
        DistributionField h = random_mass_matched(m, rng, 0.8);
        auto [lhs, rhs] = entropy_gap_lower_bound(h, m, V);
        CHECK(lhs >= rhs);
    }

    DistributionField wrong = m;
    wrong.values *= 1.5;
    CHECK_THROWS_AS(entropy_gap_lower_bound(wrong, m, V), std::invalid_argument);
}

TEST_CASE("chi2 divergence special values and contraction") {
    PhaseGrid g(64, 64, -9.0, 9.0, 8.0);
    auto V = ExternalPotential::harmonic();
    DistributionField m = steady_state_linear(1.0, V, g);

    CHECK(chi2_divergence(m, m) == doctest::Approx(mass(m)).epsilon(1e-12));
    DistributionField zero(g);
    CHECK(chi2_divergence(zero, m) == 0.0);
    CHECK_THROWS_AS(chi2_divergence(m, zero), std::invalid_argument);

    std::mt19937_64 rng(47);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    SolverConfig cfg;
    cfg.dt = 1e-3;
    cfg.transport_scheme = TransportScheme::Upwind1;
    Solver solver(g, V, cfg);
    for (int run = 0; run < 3; ++run) {
        DistributionField f(g);
        for (int i = 24; i < 40; ++i)
            for (int j = 16; j < 48; ++j) f.values(j, i) = uni(rng);
        f.values *= 1.0 / mass(f);
        SolverState st{f, 0.0, 0, nullptr};
        double prev = chi2_divergence(st.f, m);
        for (int n = 0; n < 100; ++n) {
            solver.step(st);
            const double c = chi2_divergence(st.f, m);
            CHECK(c <= prev * (1.0 + 1e-13));
            prev = c;
        }
    }
}

TEST_CASE("continuity residual vanishes for a static even state") {
    PhaseGrid g(32, 32, -6.0, 6.0, 6.0);
    DistributionField f(g);
    for (int i = 0; i < g.n_x; ++i)
        for (int j = 0; j < g.n_p; ++j)
            f.values(j, i) = std::exp(-g.x_center(i) * g.x_center(i)) *
                             std::exp(-energy1d(g.p_center(j)));
    Eigen::VectorXd res = continuity_residual(f, f, 1e-3);
    CHECK(res.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("continuity residual is second order on exact free-streaming snapshots") {
    // Sampled exact solution f(t, x, p) = f0(x - \hat p t, p); the residual
    // then measures only the functional's own discretization error.
    auto residual_at = [&](int n) {
        PhaseGrid g(n, 64, -8.0, 8.0, 4.0);
        const double dt = 0.5 * g.dx();
        auto sample = [&](double t) {
            DistributionField f(g);
            for (int i = 0; i < g.n_x; ++i)
                for (int j = 0; j < g.n_p; ++j) {
                    const double x = g.x_center(i) - rel_velocity1d(g.p_center(j)) * t;
                    f.values(j, i) = std::exp(-0.5 * x * x) * std::exp(-energy1d(g.p_center(j)));
                }
            return f;
        };
        return continuity_residual(sample(0.0), sample(dt), dt).cwiseAbs().maxCoeff();
    };
    const double r1 = residual_at(64);
    const double r2 = residual_at(128);
    CAPTURE(r1);
    CAPTURE(r2);
    CHECK(std::log2(r1 / r2) > 1.8);
}

TEST_CASE("continuity residual stays small and improves on solver output") {
    auto residual_at = [&](int n) {
        PhaseGrid g(n, 64, -8.0, 8.0, 4.0);
        auto V = ExternalPotential::none();
        DistributionField f(g);
        for (int i = 0; i < g.n_x; ++i)
            for (int j = 0; j < g.n_p; ++j)
                f.values(j, i) = std::exp(-0.5 * g.x_center(i) * g.x_center(i)) *
                                 std::exp(-energy1d(g.p_center(j)));
        SolverConfig cfg;
        cfg.dt = 0.2 * g.dx();
        cfg.collisions_enabled = false;
        Solver solver(g, V, cfg);
        SolverState st{f, 0.0, 0, nullptr};
        for (int k = 0; k < 8; ++k) solver.step(st);
        DistributionField prev = st.f;
        solver.step(st);
        return continuity_residual(prev, st.f, cfg.dt).cwiseAbs().maxCoeff();
    };
    const double r1 = residual_at(64);
    const double r2 = residual_at(128);
    CHECK(r2 < r1);
    CHECK(r2 < 0.02);
}

TEST_CASE("collision step leaves the spatial density unchanged") {
    PhaseGrid g(24, 64, -6.0, 6.0, 8.0);
    DistributionField f(g);
    std::mt19937_64 rng(53);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int i = 0; i < g.n_x; ++i)
        for (int j = 0; j < g.n_p; ++j) f.values(j, i) = uni(rng);
    Eigen::VectorXd rho_before = density(f);
    auto out = collision_step(f, 5e-3);
    Eigen::VectorXd rho_after = density(out);
    CHECK((rho_after - rho_before).cwiseAbs().maxCoeff() < 1e-13 * rho_before.maxCoeff());
}

TEST_CASE("light cone: free transport and collisions pass, superluminal fails") {
    PhaseGrid g(128, 64, -9.0, 9.0, 8.0);
    DistributionField f(g);
    for (int i = 0; i < g.n_x; ++i) {
        const double x = g.x_center(i);
        if (std::abs(x) > 2.0) continue;
        for (int j = 0; j < g.n_p; ++j)
            f.values(j, i) = std::exp(-x * x) * std::exp(-energy1d(g.p_center(j)));
    }

    auto run_cone = [&](bool collisions, double speed_scale) {
        SolverConfig cfg;
        cfg.dt = (speed_scale > 1.0 ? 0.6 : 0.877) * g.dx();
        cfg.cfl_transport = 0.95;
        cfg.transport_scheme = TransportScheme::Upwind1;
        cfg.splitting = Splitting::Lie;
        cfg.collisions_enabled = collisions;
        cfg.transport_speed_scale = speed_scale;
        Solver solver(g, ExternalPotential::none(), cfg);
        SolverState st{f, 0.0, 0, nullptr};
        std::vector<double> times{0.0};
        std::vector<DistributionField> snaps{st.f};
        const int nsteps = static_cast<int>(std::floor(0.85 / cfg.dt));
        for (int n = 0; n < nsteps; ++n) {
            solver.step(st);
            times.push_back(st.t);
            snaps.push_back(st.f);
        }
        return lightcone_check(times, snaps);
    };

    auto free_cone = run_cone(false, 1.0);
    CHECK(free_cone.pass);
    CHECK(free_cone.margin >= 0.0);

    auto coll_cone = run_cone(true, 1.0);
    CHECK(coll_cone.pass);

    auto super = run_cone(false, 1.5);
    CHECK_FALSE(super.pass);
}

TEST_CASE("series enforces increasing time stamps") {
    DiagnosticSeries s;
    s.append({0.0, 1, 0, 0, 0, 0, 0});
    s.append({0.5, 1, 0, 0, 0, 0, 0});
    CHECK_THROWS_AS(s.append({0.5, 1, 0, 0, 0, 0, 0}), std::invalid_argument);
}

} // TEST_SUITE
