// Command-line runner for the relativistic Fokker-Planck toolkit.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "relfp/runner.hpp"
#include "relfp/scenario.hpp"
#include "relfp/version.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct CommonArgs {
    std::string config_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::optional<double> mass;
    std::optional<std::string> potential;
    std::optional<double> tol;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "scenario config file (key = value sections)");
    cmd->add_option("--out", args.out_dir, "output directory")->capture_default_str();
    cmd->add_option("--seed", args.seed, "override the config seed");
    cmd->add_option("--threads", args.threads, "cap the worker thread count");
}

void add_steady(CLI::App* cmd, CommonArgs& args) {
    add_common(cmd, args);
    cmd->add_option("--mass", args.mass, "total mass M of the steady state");
    cmd->add_option("--potential", args.potential, "none|harmonic|quartic");
    cmd->add_option("--tol", args.tol, "fixed-point tolerance (sup norm)");
}

int dispatch(relfp::ScenarioKind kind, const CommonArgs& args, bool superluminal = false) {
    const std::string text = args.config_path.empty() ? "" : read_file(args.config_path);
    relfp::Scenario sc = relfp::parse_config(text, kind);
    if (args.seed) sc.seed = *args.seed;
    if (args.threads) sc.solver.threads = *args.threads;
    if (args.mass) sc.mass = *args.mass;
    if (args.potential) sc.potential_kind = *args.potential;
    if (args.tol) sc.fixed_point_tol = *args.tol;
    if (superluminal) sc.superluminal = true;

    relfp::RunResult result = relfp::run(sc, args.out_dir);
    if (result.exit_code == 0) {
        std::cout << relfp::scenario_kind_name(kind) << ": ok (artifacts in " << args.out_dir
                  << ")\n";
    } else {
        for (const auto& f : result.failures)
            std::cerr << relfp::scenario_kind_name(kind) << ": " << f << "\n";
    }
    return result.exit_code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"relfp: relativistic kinetic Fokker-Planck solver and diagnostics"};
    app.set_version_flag("--version", relfp::kVersion);
    app.require_subcommand(1);

    CommonArgs run_args, steady_args, vmfp_args, vnfp_args, inv_args, cone_args, oracle_args;
    bool superluminal = false;

    add_common(app.add_subcommand("run-linear", "advance the linear equation and record diagnostics"),
               run_args);
    add_steady(app.add_subcommand("steady-linear", "build m_M and verify it is a fixed point"),
               steady_args);
    add_steady(app.add_subcommand("steady-vmfp", "electromagnetic mean-field steady state"),
               vmfp_args);
    add_steady(app.add_subcommand("steady-vnfp", "scalar-gravity mean-field steady state"),
               vnfp_args);
    add_common(app.add_subcommand("check-invariance", "Lorentz/Galilean residual comparison"),
               inv_args);
    auto* cone = app.add_subcommand("check-lightcone", "finite-propagation support check");
    add_common(cone, cone_args);
    cone->add_flag("--superluminal", superluminal,
                   "run the artificial speed-1.5 negative control (expected to fail)");
    add_common(app.add_subcommand("check-oracles", "quadrature vs Bessel closed forms"),
               oracle_args);

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("run-linear"))
            return dispatch(relfp::ScenarioKind::RunLinear, run_args);
        if (app.got_subcommand("steady-linear"))
            return dispatch(relfp::ScenarioKind::SteadyLinear, steady_args);
        if (app.got_subcommand("steady-vmfp"))
            return dispatch(relfp::ScenarioKind::SteadyVmfp, vmfp_args);
        if (app.got_subcommand("steady-vnfp"))
            return dispatch(relfp::ScenarioKind::SteadyVnfp, vnfp_args);
        if (app.got_subcommand("check-invariance"))
            return dispatch(relfp::ScenarioKind::CheckInvariance, inv_args);
        if (app.got_subcommand("check-lightcone"))
            return dispatch(relfp::ScenarioKind::CheckLightcone, cone_args, superluminal);
        if (app.got_subcommand("check-oracles"))
            return dispatch(relfp::ScenarioKind::CheckOracles, oracle_args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
