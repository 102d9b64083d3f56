#pragma once

// Scenario execution: builds the initial state, drives the solver or the
// steady-state iterations, records diagnostics and writes every artifact
// into the output directory. Returns a nonzero exit code when an enabled
// check fails, with a machine-readable failure record on disk.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "relfp/diagnostics.hpp"
#include "relfp/fp_solver.hpp"
#include "relfp/invariance_lab.hpp"
#include "relfp/io.hpp"
#include "relfp/mean_field_steady.hpp"
#include "relfp/scenario.hpp"
#include "relfp/version.hpp"

namespace relfp {

struct RunResult {
    int exit_code = 0;
    std::vector<std::string> failures;

    void check(bool ok, const std::string& what) {
        if (!ok) {
            failures.push_back(what);
            exit_code = 1;
        }
    }
};

namespace detail {

inline void write_manifest(const Scenario& sc, const std::string& out_dir,
                           const std::vector<std::string>& extra = {}) {
    std::ofstream out(out_dir + "/manifest");
    out << "tool = relfp " << kVersion << "\n";
    out << "scenario = " << scenario_kind_name(sc.kind) << "\n";
    out << "config_hash = " << scenario_hash(sc) << "\n";
    out << "seed = " << sc.seed << "\n";
    if (sc.kind == ScenarioKind::RunLinear || sc.kind == ScenarioKind::SteadyLinear ||
        sc.kind == ScenarioKind::CheckLightcone)
        out << "grid = " << sc.n_x << "x" << sc.n_p << " on [" << format_double(sc.x_min) << ","
            << format_double(sc.x_max) << "]x[-" << format_double(sc.p_max) << ","
            << format_double(sc.p_max) << "]\n";
    if (sc.kind == ScenarioKind::SteadyVmfp || sc.kind == ScenarioKind::SteadyVnfp)
        out << "grid = " << sc.n_r << " radial cells to r_max = " << format_double(sc.r_max)
            << ", " << sc.n_q << " momentum cells to q_max = " << format_double(sc.q_max) << "\n";
    out << "potential = " << sc.potential_kind << "\n";
    for (const auto& line : extra) out << line << "\n";
}

inline void write_failures(const std::string& out_dir, const RunResult& result) {
    if (result.failures.empty()) return;
    std::ofstream out(out_dir + "/failure");
    out << "exit_code = " << result.exit_code << "\n";
    for (size_t k = 0; k < result.failures.size(); ++k)
        out << "failure_" << k << " = " << result.failures[k] << "\n";
}

inline DistributionField initial_field(const Scenario& sc, const PhaseGrid& grid,
                                       const ExternalPotential& V) {
    DistributionField f(grid);
    if (sc.initial_kind == "steady") return steady_state_linear(sc.mass, V, grid);
    if (sc.initial_kind == "shifted_juttner") {
        for (int i = 0; i < grid.n_x; ++i)
            for (int j = 0; j < grid.n_p; ++j)
                f.values(j, i) = std::exp(-V.value(grid.x_center(i))) *
                                 std::exp(-energy1d(grid.p_center(j) - sc.p_shift));
    } else if (sc.initial_kind == "gaussian_bump" || sc.initial_kind == "compact_bump") {
        for (int i = 0; i < grid.n_x; ++i) {
            const double dx = grid.x_center(i) - sc.x_center;
            if (sc.initial_kind == "compact_bump" && std::abs(dx) > sc.support_radius) continue;
            for (int j = 0; j < grid.n_p; ++j) {
                const double dp = grid.p_center(j) - sc.p_center;
                f.values(j, i) = std::exp(-0.5 * dx * dx / (sc.x_width * sc.x_width)) *
                                 std::exp(-0.5 * dp * dp / (sc.p_width * sc.p_width));
            }
        }
    } else {
        throw std::invalid_argument("unknown initial kind: " + sc.initial_kind);
    }
    const double m = mass(f);
    if (!(m > 0.0)) throw std::runtime_error("initial datum has zero mass on this grid");
    f.values *= sc.mass / m;
    return f;
}

inline std::string snapshot_name(int index, const char* ext) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "snapshot_t%04d.%s", index, ext);
    return buf;
}

} // namespace detail

inline RunResult run_linear(const Scenario& sc, const std::string& out_dir) {
    RunResult result;
    const PhaseGrid grid = sc.phase_grid();
    const ExternalPotential V = sc.potential();
    Solver solver(grid, V, sc.solver);
    SolverState state{detail::initial_field(sc, grid, V), 0.0, 0, nullptr};

    // chi2 is measured against the steady state of the same mass whenever
    // the potential confines on this grid.
    const bool confining = V.boundary_weight(grid) < 1e-10;
    DistributionField reference;
    if (confining) reference = steady_state_linear(sc.mass, V, grid);

    DiagnosticSeries series;
    const double mass0 = mass(state.f);
    int snapshot_index = 0;
    auto record = [&](const SolverState& s) {
        DiagnosticRecord r;
        r.t = s.t;
        r.mass = mass(s.f);
        r.free_energy = free_energy(s.f, V);
        r.free_energy_plus = free_energy_positive(s.f, V);
        r.dissipation = entropy_dissipation(s.f);
        r.chi2 = confining ? chi2_divergence(s.f, reference) : 0.0;
        r.support_radius = support_radius(s.f);
        series.append(r);
    };

    record(state);
    detail::write_manifest(sc, out_dir);
    write_snapshot_csv(out_dir + "/" + detail::snapshot_name(snapshot_index, "csv"), state.f);
    if (sc.write_raw)
        write_snapshot_raw(out_dir + "/" + detail::snapshot_name(snapshot_index, "raw"), state.f,
                           state.t);
    ++snapshot_index;

    const long n_steps = std::lround(sc.solver.t_end / sc.solver.dt);
    for (long n = 1; n <= n_steps; ++n) {
        solver.step(state);
        if (n % sc.diagnostics_every == 0 || n == n_steps) record(state);
        if (sc.snapshot_every > 0 && n % sc.snapshot_every == 0 && n != n_steps) {
            write_snapshot_csv(out_dir + "/" + detail::snapshot_name(snapshot_index, "csv"),
                               state.f);
            if (sc.write_raw)
                write_snapshot_raw(out_dir + "/" + detail::snapshot_name(snapshot_index, "raw"),
                                   state.f, state.t);
            ++snapshot_index;
        }
    }
    write_snapshot_csv(out_dir + "/" + detail::snapshot_name(snapshot_index, "csv"), state.f);
    if (sc.write_raw)
        write_snapshot_raw(out_dir + "/" + detail::snapshot_name(snapshot_index, "raw"), state.f,
                           state.t);
    write_diagnostics_csv(out_dir + "/diagnostics.csv", series);

    const double drift = std::abs(mass(state.f) - mass0) / mass0;
    result.check(drift <= 1e-12, "mass drift " + format_double(drift) + " exceeds 1e-12");
    result.check(state.f.values.minCoeff() >= 0.0, "negative values in the final state");
    detail::write_failures(out_dir, result);
    return result;
}

inline RunResult run_steady_linear(const Scenario& sc, const std::string& out_dir) {
    RunResult result;
    const PhaseGrid grid = sc.phase_grid();
    const ExternalPotential V = sc.potential();
    DistributionField m = steady_state_linear(sc.mass, V, grid);

    Solver solver(grid, V, sc.solver);
    SolverState state{m, 0.0, 0, nullptr};
    solver.step(state);
    const double change = (state.f.values - m.values).abs().maxCoeff() / m.values.maxCoeff();

    detail::write_manifest(sc, out_dir,
                           {"mass = " + format_double(mass(m)),
                            "step_invariance = " + format_double(change)});
    write_snapshot_csv(out_dir + "/snapshot_t0000.csv", m);
    if (sc.write_raw) write_snapshot_raw(out_dir + "/snapshot_t0000.raw", m, 0.0);

    result.check(std::abs(mass(m) - sc.mass) <= 1e-12 * sc.mass, "steady-state mass is off");
    result.check(change <= 1e-12,
                 "steady state moved by " + format_double(change) + " in one step");
    detail::write_failures(out_dir, result);
    return result;
}

inline RunResult run_steady_vmfp(const Scenario& sc, const std::string& out_dir) {
    RunResult result;
    const ExternalPotential V = sc.potential();
    VmfpSolution sol = vmfp_steady(sc.mass, V, sc.radial_grid(), sc.momentum_grid(),
                                   sc.fixed_point_config());
    const double residual = weighted_l2(radial_laplacian_residual(sol.U, sol.rho), sol.U.grid);

    write_radial_profile_csv(out_dir + "/profile.csv", "U", sol.U, sol.rho);
    write_convergence_csv(out_dir + "/convergence.csv", sol.trace.updates, sol.trace.ratios);
    detail::write_manifest(sc, out_dir,
                           {"iterations = " + std::to_string(sol.iterations),
                            "elliptic_residual = " + format_double(residual),
                            "mass = " + format_double(profile_mass(sol.m_M))});

    result.check(residual <= 1e-6, "elliptic residual " + format_double(residual) + " > 1e-6");
    result.check(std::abs(profile_mass(sol.m_M) - sc.mass) <= 1e-10 * sc.mass, "mass is off");
    detail::write_failures(out_dir, result);
    return result;
}

inline RunResult run_steady_vnfp(const Scenario& sc, const std::string& out_dir) {
    RunResult result;
    const ExternalPotential V = sc.potential();
    VnfpSolution sol =
        vnfp_steady(sc.mass, V, sc.radial_grid(), sc.momentum_grid(), sc.fixed_point_config());

    Eigen::VectorXd v_of_r(sc.n_r);
    const RadialGrid rg = sc.radial_grid();
    for (int k = 0; k < sc.n_r; ++k) v_of_r[k] = V.value(rg.r(k));
    const RadialField g = vnfp_rhs(sc.mass, v_of_r, sol.fp.u);
    const double residual = weighted_l2(radial_laplacian_residual(sol.fp.u, g), rg);
    const SobolevCheck sob = sobolev_check(sol.phi0);

    write_radial_profile_csv(out_dir + "/profile.csv", "phi0", sol.phi0,
                             profile_density(sol.m_M));
    write_convergence_csv(out_dir + "/convergence.csv", sol.fp.trace.updates,
                          sol.fp.trace.ratios);
    std::ostringstream ladder;
    for (size_t k = 0; k < sol.continuation_masses.size(); ++k)
        ladder << (k ? " " : "") << format_double(sol.continuation_masses[k]);
    detail::write_manifest(
        sc, out_dir,
        {"iterations = " + std::to_string(sol.fp.iterations),
         "contraction_ratio = " + format_double(sol.fp.contraction_ratio),
         "elliptic_residual = " + format_double(residual),
         "continuation_masses = " + ladder.str(),
         "sobolev_l6 = " + format_double(sob.l6_norm),
         "sobolev_grad_l2 = " + format_double(sob.grad_l2_norm)});

    result.check(residual <= 1e-6, "elliptic residual " + format_double(residual) + " > 1e-6");
    result.check(sol.phi0.values.maxCoeff() <= 0.0, "phi0 must be nonpositive");
    result.check(sob.pass, "Sobolev inequality violated");
    result.check(std::abs(profile_mass(sol.m_M) - sc.mass) <= 1e-10 * sc.mass, "mass is off");
    detail::write_failures(out_dir, result);
    return result;
}

inline RunResult run_check_invariance(const Scenario& sc, const std::string& out_dir,
                                      std::ostream& table) {
    RunResult result;
    PhaseGaussian g = PhaseGaussian::standard(3);
    PhaseFunction f = [g](double t, const Vec& x, const Vec& p) { return g(t, x, p); };
    auto points = sample_points(sc.n_points, 3, static_cast<unsigned>(sc.seed));
    Vec u = Vec::Zero(3);
    u[0] = sc.boost;

    auto lorentz = lorentz_invariance_residual(u, f, points, 0.0, sc.fd_step);
    auto galilean = galilean_invariance_residual(u, f, points, 0.0, sc.fd_step);
    const double tol = 1e-6;

    table << "# lorentz boost u = (" << format_double(sc.boost) << ",0,0), beta = 0\n";
    table << "point,r_original,r_boosted,abs_diff,pass\n";
    double worst = 0.0;
    for (size_t k = 0; k < lorentz.size(); ++k) {
        const auto& s = lorentz[k];
        worst = std::max(worst, s.difference);
        table << k << ',' << format_double(s.r_original) << ',' << format_double(s.r_boosted)
              << ',' << format_double(s.difference) << ',' << (s.difference <= tol ? "pass" : "FAIL")
              << '\n';
    }
    table << "# galilean boost, beta = 0\n";
    for (size_t k = 0; k < galilean.size(); ++k) {
        const auto& s = galilean[k];
        worst = std::max(worst, s.difference);
        table << k << ',' << format_double(s.r_original) << ',' << format_double(s.r_boosted)
              << ',' << format_double(s.difference) << ',' << (s.difference <= tol ? "pass" : "FAIL")
              << '\n';
    }
    result.check(worst <= tol, "invariance residual mismatch " + format_double(worst));

    // Friction negative controls must disagree.
    auto lorentz_friction = lorentz_invariance_residual(u, f, points, 1.0, sc.fd_step);
    auto galilean_friction = galilean_invariance_residual(u, f, points, 1.0, sc.fd_step);
    double worst_friction_l = 0.0, worst_friction_g = 0.0;
    for (const auto& s : lorentz_friction) worst_friction_l = std::max(worst_friction_l, s.difference);
    for (const auto& s : galilean_friction) worst_friction_g = std::max(worst_friction_g, s.difference);
    table << "# friction controls: lorentz max diff = " << format_double(worst_friction_l)
          << ", galilean max diff = " << format_double(worst_friction_g) << "\n";
    result.check(worst_friction_l > 1e-2, "lorentz friction control failed to break invariance");
    result.check(worst_friction_g > 1e-2, "galilean friction control failed to break invariance");

    detail::write_manifest(sc, out_dir, {"worst_diff = " + format_double(worst)});
    detail::write_failures(out_dir, result);
    return result;
}

inline RunResult run_check_lightcone(const Scenario& sc, const std::string& out_dir,
                                     std::ostream& log) {
    RunResult result;
    const PhaseGrid grid = sc.phase_grid();
    Scenario local = sc;
    local.initial_kind = "compact_bump";

    auto run_cone = [&](bool collisions, double speed_scale) {
        SolverConfig cfg = sc.solver;
        cfg.dt = (speed_scale > 1.0 ? 0.6 : 0.877) * grid.dx();
        cfg.cfl_transport = 0.95;
        cfg.transport_scheme = TransportScheme::Upwind1;
        cfg.splitting = Splitting::Lie;
        cfg.collisions_enabled = collisions;
        cfg.transport_speed_scale = speed_scale;
        Solver solver(grid, ExternalPotential::none(), cfg);
        SolverState st{detail::initial_field(local, grid, ExternalPotential::none()), 0.0, 0,
                       nullptr};
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

    if (sc.superluminal) {
        auto control = run_cone(false, 1.5);
        log << "superluminal control: margin = " << format_double(control.margin)
            << (control.pass ? " (unexpected pass)" : " (fails as expected)") << "\n";
        // The control run violates the cone, so the check itself fails.
        result.check(false, "superluminal transport violates the light cone (negative control)");
    } else {
        auto free_cone = run_cone(false, 1.0);
        auto coll_cone = run_cone(true, 1.0);
        log << "free transport:  margin = " << format_double(free_cone.margin) << "\n";
        log << "with collisions: margin = " << format_double(coll_cone.margin) << "\n";
        result.check(free_cone.pass, "free-transport light cone violated");
        result.check(coll_cone.pass, "collisional light cone violated");
        detail::write_manifest(sc, out_dir,
                               {"margin_free = " + format_double(free_cone.margin),
                                "margin_collisions = " + format_double(coll_cone.margin)});
    }
    detail::write_failures(out_dir, result);
    return result;
}

inline RunResult run_check_oracles(const Scenario& sc, const std::string& out_dir,
                                   std::ostream& table) {
    RunResult result;
    table << "a,number_quad,number_bessel,density_quad,density_bessel,line_quad,line_bessel,"
             "worst_rel\n";
    double worst = 0.0;
    for (double a : {0.3, 0.5, 1.0, 2.0, 3.0, 5.0}) {
        const double n_quad = momentum_number_integral(a);
        const double n_ref = momentum_number_integral_closed(a);
        const double d_quad = momentum_density_integral(a);
        const double d_ref = momentum_density_integral_closed(a);
        const double l_quad = momentum_density_integral_1d(a);
        const double l_ref = momentum_density_integral_1d_closed(a);
        const double rel = std::max({std::abs(n_quad - n_ref) / n_ref,
                                     std::abs(d_quad - d_ref) / d_ref,
                                     std::abs(l_quad - l_ref) / l_ref});
        worst = std::max(worst, rel);
        table << format_double(a) << ',' << format_double(n_quad) << ',' << format_double(n_ref)
              << ',' << format_double(d_quad) << ',' << format_double(d_ref) << ','
              << format_double(l_quad) << ',' << format_double(l_ref) << ','
              << format_double(rel) << '\n';
    }
    result.check(worst <= 1e-8,
                 "quadrature vs Bessel disagreement " + format_double(worst) + " > 1e-8");
    detail::write_manifest(sc, out_dir, {"worst_rel = " + format_double(worst)});
    detail::write_failures(out_dir, result);
    return result;
}

/// Dispatches one scenario; artifacts land in out_dir (created on demand).
inline RunResult run(const Scenario& sc, const std::string& out_dir,
                     std::ostream& console = std::cout) {
    std::filesystem::create_directories(out_dir);
    switch (sc.kind) {
        case ScenarioKind::RunLinear: return run_linear(sc, out_dir);
        case ScenarioKind::SteadyLinear: return run_steady_linear(sc, out_dir);
        case ScenarioKind::SteadyVmfp: return run_steady_vmfp(sc, out_dir);
        case ScenarioKind::SteadyVnfp: return run_steady_vnfp(sc, out_dir);
        case ScenarioKind::CheckInvariance: return run_check_invariance(sc, out_dir, console);
        case ScenarioKind::CheckLightcone: return run_check_lightcone(sc, out_dir, console);
        case ScenarioKind::CheckOracles: return run_check_oracles(sc, out_dir, console);
    }
    throw std::logic_error("unhandled scenario kind");
}

} // namespace relfp
