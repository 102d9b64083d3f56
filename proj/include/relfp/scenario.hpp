#pragma once

// Scenario descriptions and the sectioned key = value config parser.
// Unknown sections and keys are hard errors carrying the line number; a
// near-miss key also gets a spelling suggestion.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "relfp/fp_solver.hpp"
#include "relfp/io.hpp"
#include "relfp/mean_field_steady.hpp"
#include "relfp/phase_grid.hpp"

namespace relfp {

enum class ScenarioKind {
    RunLinear,
    SteadyLinear,
    SteadyVmfp,
    SteadyVnfp,
    CheckInvariance,
    CheckLightcone,
    CheckOracles
};

inline std::string scenario_kind_name(ScenarioKind k) {
    switch (k) {
        case ScenarioKind::RunLinear: return "run-linear";
        case ScenarioKind::SteadyLinear: return "steady-linear";
        case ScenarioKind::SteadyVmfp: return "steady-vmfp";
        case ScenarioKind::SteadyVnfp: return "steady-vnfp";
        case ScenarioKind::CheckInvariance: return "check-invariance";
        case ScenarioKind::CheckLightcone: return "check-lightcone";
        case ScenarioKind::CheckOracles: return "check-oracles";
    }
    return "?";
}

struct Scenario {
    ScenarioKind kind = ScenarioKind::RunLinear;

    // [grid]
    int n_x = 128;
    int n_p = 128;
    double x_min = -9.0;
    double x_max = 9.0;
    double p_max = 8.0;

    // [potential]
    std::string potential_kind = "harmonic"; // none | harmonic | quartic | tabulated
    std::string potential_file;

    // [solver]
    SolverConfig solver;

    // [initial]
    std::string initial_kind = "steady"; // steady | shifted_juttner | gaussian_bump | compact_bump
    double mass = 1.0;
    double p_shift = 2.0;
    double x_center = 0.0;
    double p_center = 0.0;
    double x_width = 1.0;
    double p_width = 1.0;
    double support_radius = 2.0;

    // [output]
    int diagnostics_every = 1;
    int snapshot_every = 0; // 0: initial and final only
    bool write_raw = true;

    // [steady]
    int n_r = 4096;
    double r_max = 12.0;
    int n_q = 256;
    double q_max = 25.0;
    double damping = 0.5;
    double fixed_point_tol = 1e-10;
    int max_iter = 500;

    // [invariance]
    double boost = 0.3;
    int n_points = 20;
    double fd_step = 1e-3;

    // [lightcone]
    bool superluminal = false;

    // [run]
    std::uint64_t seed = 12345;

    std::string config_text; // canonical text for the manifest hash

    PhaseGrid phase_grid() const { return PhaseGrid(n_x, n_p, x_min, x_max, p_max); }
    RadialGrid radial_grid() const { return RadialGrid(n_r, r_max); }
    MomentumRadialGrid momentum_grid() const { return MomentumRadialGrid(n_q, q_max); }

    ExternalPotential potential() const {
        if (potential_kind == "none") return ExternalPotential::none();
        if (potential_kind == "harmonic") return ExternalPotential::harmonic();
        if (potential_kind == "quartic") return ExternalPotential::quartic();
        if (potential_kind == "tabulated") {
            std::ifstream in(potential_file);
            if (!in)
                throw std::runtime_error("cannot open tabulated potential file: " + potential_file);
            std::vector<double> xs, vs;
            double x, v;
            while (in >> x >> v) {
                xs.push_back(x);
                vs.push_back(v);
            }
            return ExternalPotential::tabulated(std::move(xs), std::move(vs));
        }
        throw std::invalid_argument("unknown potential kind: " + potential_kind);
    }

    FixedPointConfig fixed_point_config() const {
        FixedPointConfig cfg;
        cfg.damping = damping;
        cfg.tol = fixed_point_tol;
        cfg.max_iter = max_iter;
        cfg.mass = mass;
        return cfg;
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    size_t b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

inline int levenshtein(const std::string& a, const std::string& b) {
    std::vector<int> prev(b.size() + 1), cur(b.size() + 1);
    for (size_t j = 0; j <= b.size(); ++j) prev[j] = static_cast<int>(j);
    for (size_t i = 1; i <= a.size(); ++i) {
        cur[0] = static_cast<int>(i);
        for (size_t j = 1; j <= b.size(); ++j) {
            const int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

[[noreturn]] inline void fail(int line, const std::string& message) {
    std::ostringstream out;
    out << "config error (line " << line << "): " << message;
    throw std::invalid_argument(out.str());
}

inline double parse_number(const std::string& value, const std::string& key, int line) {
    try {
        size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) fail(line, "trailing characters in value for '" + key + "'");
        return v;
    } catch (const std::invalid_argument&) {
        fail(line, "cannot parse numeric value '" + value + "' for key '" + key + "'");
    } catch (const std::out_of_range&) {
        fail(line, "numeric value out of range for key '" + key + "'");
    }
}

inline int parse_int(const std::string& value, const std::string& key, int line) {
    const double v = parse_number(value, key, line);
    if (v != std::floor(v)) fail(line, "expected an integer for key '" + key + "'");
    return static_cast<int>(v);
}

inline bool parse_bool(const std::string& value, const std::string& key, int line) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    fail(line, "expected true/false for key '" + key + "'");
}

} // namespace detail

/// Parses a sectioned key = value config into a Scenario. The kind comes
/// from the CLI subcommand, not from the file.
inline Scenario parse_config(const std::string& text, ScenarioKind kind) {
    using detail::fail;
    Scenario sc;
    sc.kind = kind;
    sc.config_text = text;

    static const std::map<std::string, std::vector<std::string>> known = {
        {"grid", {"n_x", "n_p", "x_min", "x_max", "p_max"}},
        {"potential", {"kind", "file"}},
        {"solver",
         {"dt", "t_end", "cfl_transport", "splitting", "collision_weights", "transport_scheme",
          "collisions_enabled", "transport_speed_scale", "threads"}},
        {"initial",
         {"kind", "mass", "p_shift", "x_center", "p_center", "x_width", "p_width", "radius"}},
        {"output", {"diagnostics_every", "snapshot_every", "write_raw"}},
        {"steady", {"n_r", "r_max", "n_q", "q_max", "mass", "damping", "tol", "max_iter"}},
        {"invariance", {"boost", "n_points", "fd_step"}},
        {"lightcone", {"superluminal"}},
        {"run", {"seed"}},
    };

    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string s = raw;
        const size_t hash = s.find('#');
        if (hash != std::string::npos) s = s.substr(0, hash);
        s = detail::trim(s);
        if (s.empty()) continue;

        if (s.front() == '[') {
            if (s.back() != ']') fail(line, "unterminated section header");
            section = detail::trim(s.substr(1, s.size() - 2));
            if (!known.count(section)) fail(line, "unknown section [" + section + "]");
            continue;
        }

        const size_t eq = s.find('=');
        if (eq == std::string::npos) fail(line, "expected key = value");
        if (section.empty()) fail(line, "key outside of any [section]");
        const std::string key = detail::trim(s.substr(0, eq));
        const std::string value = detail::trim(s.substr(eq + 1));
        if (key.empty()) fail(line, "empty key");
        if (value.empty()) fail(line, "missing value for key '" + key + "'");

        const auto& keys = known.at(section);
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
            std::string best;
            int best_d = 4;
            for (const auto& k : keys) {
                const int d = detail::levenshtein(key, k);
                if (d < best_d) {
                    best_d = d;
                    best = k;
                }
            }
            std::string msg = "unknown key '" + key + "' in section [" + section + "]";
            if (!best.empty()) msg += "; did you mean '" + best + "'?";
            fail(line, msg);
        }

        auto num = [&] { return detail::parse_number(value, key, line); };
        auto integer = [&] { return detail::parse_int(value, key, line); };
        auto boolean = [&] { return detail::parse_bool(value, key, line); };
        auto positive = [&](double v) {
            if (!(v > 0.0)) fail(line, "key '" + key + "' must be positive");
            return v;
        };
        auto positive_int = [&](int v) {
            if (v < 1) fail(line, "key '" + key + "' must be a positive integer");
            return v;
        };

        if (section == "grid") {
            if (key == "n_x") sc.n_x = positive_int(integer());
            else if (key == "n_p") sc.n_p = positive_int(integer());
            else if (key == "x_min") sc.x_min = num();
            else if (key == "x_max") sc.x_max = num();
            else if (key == "p_max") sc.p_max = positive(num());
        } else if (section == "potential") {
            if (key == "kind") {
                if (value != "none" && value != "harmonic" && value != "quartic" &&
                    value != "tabulated")
                    fail(line, "potential kind must be none|harmonic|quartic|tabulated");
                sc.potential_kind = value;
            } else if (key == "file") {
                sc.potential_file = value;
            }
        } else if (section == "solver") {
            if (key == "dt") sc.solver.dt = positive(num());
            else if (key == "t_end") sc.solver.t_end = positive(num());
            else if (key == "cfl_transport") {
                const double v = num();
                if (!(v > 0.0 && v <= 1.0)) fail(line, "cfl_transport must lie in (0, 1]");
                sc.solver.cfl_transport = v;
            } else if (key == "splitting") {
                if (value == "lie") sc.solver.splitting = Splitting::Lie;
                else if (value == "strang") sc.solver.splitting = Splitting::Strang;
                else fail(line, "splitting must be lie|strang");
            } else if (key == "collision_weights") {
                if (value == "chang_cooper") sc.solver.collision_weights = CollisionWeights::ChangCooper;
                else if (value == "centered") sc.solver.collision_weights = CollisionWeights::Centered;
                else fail(line, "collision_weights must be chang_cooper|centered");
            } else if (key == "transport_scheme") {
                if (value == "upwind1") sc.solver.transport_scheme = TransportScheme::Upwind1;
                else if (value == "muscl_minmod") sc.solver.transport_scheme = TransportScheme::MusclMinmod;
                else fail(line, "transport_scheme must be upwind1|muscl_minmod");
            } else if (key == "collisions_enabled") {
                sc.solver.collisions_enabled = boolean();
            } else if (key == "transport_speed_scale") {
                sc.solver.transport_speed_scale = positive(num());
            } else if (key == "threads") {
                sc.solver.threads = positive_int(integer());
            }
        } else if (section == "initial") {
            if (key == "kind") {
                if (value != "steady" && value != "shifted_juttner" && value != "gaussian_bump" &&
                    value != "compact_bump")
                    fail(line, "initial kind must be steady|shifted_juttner|gaussian_bump|compact_bump");
                sc.initial_kind = value;
            } else if (key == "mass") sc.mass = positive(num());
            else if (key == "p_shift") sc.p_shift = num();
            else if (key == "x_center") sc.x_center = num();
            else if (key == "p_center") sc.p_center = num();
            else if (key == "x_width") sc.x_width = positive(num());
            else if (key == "p_width") sc.p_width = positive(num());
            else if (key == "radius") sc.support_radius = positive(num());
        } else if (section == "output") {
            if (key == "diagnostics_every") sc.diagnostics_every = positive_int(integer());
            else if (key == "snapshot_every") {
                const int v = integer();
                if (v < 0) fail(line, "snapshot_every must be >= 0");
                sc.snapshot_every = v;
            } else if (key == "write_raw") sc.write_raw = boolean();
        } else if (section == "steady") {
            if (key == "n_r") sc.n_r = positive_int(integer());
            else if (key == "r_max") sc.r_max = positive(num());
            else if (key == "n_q") sc.n_q = positive_int(integer());
            else if (key == "q_max") sc.q_max = positive(num());
            else if (key == "mass") sc.mass = positive(num());
            else if (key == "damping") {
                const double v = num();
                if (!(v > 0.0 && v <= 1.0)) fail(line, "damping must lie in (0, 1]");
                sc.damping = v;
            } else if (key == "tol") sc.fixed_point_tol = positive(num());
            else if (key == "max_iter") sc.max_iter = positive_int(integer());
        } else if (section == "invariance") {
            if (key == "boost") sc.boost = num();
            else if (key == "n_points") sc.n_points = positive_int(integer());
            else if (key == "fd_step") sc.fd_step = positive(num());
        } else if (section == "lightcone") {
            if (key == "superluminal") sc.superluminal = boolean();
        } else if (section == "run") {
            if (key == "seed") {
                const double v = num();
                if (v < 0 || v != std::floor(v)) fail(line, "seed must be a nonnegative integer");
                sc.seed = static_cast<std::uint64_t>(v);
            }
        }
    }

    if (!(sc.x_max > sc.x_min)) throw std::invalid_argument("config error: x_max must exceed x_min");
    if (sc.potential_kind == "tabulated" && sc.potential_file.empty())
        throw std::invalid_argument(
            "config error: potential kind 'tabulated' requires key 'file' in [potential]");
    return sc;
}

inline std::uint64_t scenario_hash(const Scenario& sc) {
    return fnv1a_hash(sc.config_text + "|" + scenario_kind_name(sc.kind) + "|" +
                      std::to_string(sc.seed));
}

} // namespace relfp
