#pragma once

// Time-dependent solver for the d = 1 relativistic kinetic Fokker-Planck
// equation
//
//   df/dt + \hat p df/dx - V'(x) df/dp = d/dp( D(p) df/dp + p f ),
//   D(p) = sqrt(1 + p^2),
//
// split into an explicit conservative transport update and an implicit
// momentum-space collision solve.
//
// Both pieces are written in the ratio variable g = f / (e^{-V} e^{-p0}),
// with face weights built from the same equilibrium factors. The discrete
// flux divergence then vanishes identically on the discrete steady state
// m_M = (M/Theta) e^{-V - p0}, so m_M is a fixed point of the full step up
// to rounding, and the implicit collision matrix is an M-matrix for any dt.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

#include "relfp/kinematics.hpp"
#include "relfp/phase_grid.hpp"
#include "relfp/util.hpp"

namespace relfp {

enum class Splitting { Lie, Strang };
enum class CollisionWeights { ChangCooper, Centered };
enum class TransportScheme { Upwind1, MusclMinmod };

struct SolverConfig {
    double dt = 1e-3;
    double t_end = 1.0;
    double cfl_transport = 0.45;
    Splitting splitting = Splitting::Strang;
    CollisionWeights collision_weights = CollisionWeights::ChangCooper;
    TransportScheme transport_scheme = TransportScheme::MusclMinmod;
    bool collisions_enabled = true;
    // Test-only multiplier on the transport velocities; 1.5 turns the
    // light-cone check into its negative control.
    double transport_speed_scale = 1.0;
    int threads = 1;
};

struct SolverState {
    DistributionField f;
    double t = 0.0;
    long step_count = 0;
    std::function<void(const SolverState&)> on_step; // diagnostics hook
};

inline double minmod(double a, double b) {
    if (a > 0.0 && b > 0.0) return std::min(a, b);
    if (a < 0.0 && b < 0.0) return std::max(a, b);
    return 0.0;
}

/// Explicit conservative transport update: x-advection at the discrete
/// velocity of row j and p-advection at the discrete force of column i.
class TransportOperator {
public:
    TransportOperator(const PhaseGrid& grid, const ExternalPotential& V,
                      TransportScheme scheme = TransportScheme::MusclMinmod,
                      double speed_scale = 1.0)
        : grid_(grid), scheme_(scheme) {
        if (grid.n_x < 3 || grid.n_p < 3)
            throw std::invalid_argument("TransportOperator: need at least 3 cells per axis");
        if (energy1d(grid.p_max) > 700.0)
            throw std::invalid_argument("TransportOperator: p_max too large for the exponential weights");
        const int nx = grid.n_x, np = grid.n_p;
        a_.resize(nx);
        a_face_.resize(nx + 1);
        b_.resize(np);
        b_face_.resize(np + 1);
        v_.resize(np);
        w_.resize(nx);

        for (int i = 0; i < nx; ++i) a_[i] = std::exp(-V.value(grid.x_center(i)));
        for (int i = 0; i <= nx; ++i) a_face_[i] = std::exp(-V.value(grid.x_face(i)));
        for (int j = 0; j < np; ++j) b_[j] = std::exp(-energy1d(grid.p_center(j)));
        // Momentum face weights are offset to vanish at both walls, which
        // zeroes the wall fluxes without breaking the equilibrium identity.
        const double b_wall = std::exp(-energy1d(grid.p_face(0)));
        for (int j = 0; j <= np; ++j)
            b_face_[j] = std::exp(-energy1d(grid.p_face(j))) - b_wall;

        // Discrete velocities induced by the face weights; they approximate
        // \hat p(p_j) and -V'(x_i) to second order.
        for (int j = 0; j < np; ++j)
            v_[j] = -(b_face_[j + 1] - b_face_[j]) / (grid.dp() * b_[j]) * speed_scale;
        for (int i = 0; i < nx; ++i)
            w_[i] = (a_face_[i + 1] - a_face_[i]) / (grid.dx() * a_[i]);
    }

    const Eigen::VectorXd& row_velocity() const { return v_; }
    const Eigen::VectorXd& column_force() const { return w_; }
    double equilibrium_weight(int ix, int jp) const { return a_[ix] * b_[jp]; }

    /// nullopt when the explicit update is a convex combination for this dt,
    /// otherwise a message naming the offending ratio.
    std::optional<std::string> check_dt(double dt, double cfl_limit) const {
        const double dx = grid_.dx(), dp = grid_.dp();
        const double vmax = v_.cwiseAbs().maxCoeff();
        const double wmax = w_.cwiseAbs().maxCoeff();
        std::ostringstream msg;
        if (dt * vmax / dx > cfl_limit) {
            msg << "transport CFL violated in x: dt*max|v|/dx = " << dt * vmax / dx
                << " exceeds cfl_transport = " << cfl_limit;
            return msg.str();
        }
        if (dt * wmax / dp > cfl_limit) {
            msg << "transport CFL violated in p: dt*max|dV/dx|/dp = " << dt * wmax / dp
                << " exceeds cfl_transport = " << cfl_limit;
            return msg.str();
        }
        const double limiter = scheme_ == TransportScheme::MusclMinmod ? 2.0 : 1.0;
        double worst = 0.0;
        for (int i = 0; i < grid_.n_x; ++i) {
            for (int j = 0; j < grid_.n_p; ++j) {
                const double out_x = dt / dx * std::abs(v_[j]) *
                                     std::max(a_face_[i], a_face_[i + 1]) / a_[i];
                const double out_p = dt / dp * std::abs(w_[i]) *
                                     std::max(b_face_[j], b_face_[j + 1]) / b_[j];
                worst = std::max(worst, limiter * (out_x + out_p));
            }
        }
        if (worst > 1.0) {
            msg << "transport positivity bound violated: max outflow fraction " << worst
                << " > 1 (reduce dt)";
            return msg.str();
        }
        return std::nullopt;
    }

    void apply(DistributionField& f, double dt, int threads = 1) const {
        const int nx = grid_.n_x, np = grid_.n_p;
        const double dx = grid_.dx(), dp = grid_.dp();
        Eigen::ArrayXXd g(np, nx);
        for (int i = 0; i < nx; ++i)
            for (int j = 0; j < np; ++j) g(j, i) = f.values(j, i) / (a_[i] * b_[j]);

        Eigen::ArrayXXd div = Eigen::ArrayXXd::Zero(np, nx);

        // x-direction sweep, one momentum row at a time.
        parallel_for(0, np, threads, [&](int j) {
            const double v = v_[j];
            const double nu = std::abs(v) * dt / dx;
            double flux_left = 0.0; // face i = 0 inflow face (ghost g = 0)
            {
                const double gf = face_value_x(g, j, 0, v, nu, nx);
                flux_left = v * a_face_[0] * b_[j] * gf;
            }
            for (int i = 0; i < nx; ++i) {
                const double gf = face_value_x(g, j, i + 1, v, nu, nx);
                const double flux_right = v * a_face_[i + 1] * b_[j] * gf;
                div(j, i) += (flux_right - flux_left) / dx;
                flux_left = flux_right;
            }
        });

        // p-direction sweep, one spatial column at a time. Wall faces carry
        // zero weight, so no mass crosses the momentum cutoff.
        parallel_for(0, nx, threads, [&](int i) {
            const double w = w_[i];
            const double nu = std::abs(w) * dt / dp;
            double flux_below = 0.0; // b_face_[0] = 0
            for (int j = 0; j < np; ++j) {
                double flux_above = 0.0;
                if (j + 1 < np) {
                    const double gf = face_value_p(g, i, j + 1, w, nu, np);
                    flux_above = w * a_[i] * b_face_[j + 1] * gf;
                }
                div(j, i) += (flux_above - flux_below) / dp;
                flux_below = flux_above;
            }
        });

        f.values -= dt * div;
    }

private:
    // Reconstructed g at x-face k (between cells k-1 and k) for row j.
    double face_value_x(const Eigen::ArrayXXd& g, int j, int k, double v, double nu,
                        int nx) const {
        auto cell = [&](int c) { return (c >= 0 && c < nx) ? g(j, c) : 0.0; };
        if (v >= 0.0) {
            const int c = k - 1;
            if (c < 0) return 0.0;
            if (scheme_ == TransportScheme::Upwind1) return cell(c);
            const double slope = minmod(cell(c) - cell(c - 1), cell(c + 1) - cell(c));
            return cell(c) + 0.5 * (1.0 - nu) * slope;
        }
        const int c = k;
        if (c >= nx) return 0.0;
        if (scheme_ == TransportScheme::Upwind1) return cell(c);
        const double slope = minmod(cell(c) - cell(c - 1), cell(c + 1) - cell(c));
        return cell(c) - 0.5 * (1.0 - nu) * slope;
    }

    double face_value_p(const Eigen::ArrayXXd& g, int i, int k, double w, double nu,
                        int np) const {
        auto cell = [&](int c) { return (c >= 0 && c < np) ? g(c, i) : 0.0; };
        if (w >= 0.0) {
            const int c = k - 1;
            if (c < 0) return 0.0;
            if (scheme_ == TransportScheme::Upwind1) return cell(c);
            const double slope = minmod(cell(c) - cell(c - 1), cell(c + 1) - cell(c));
            return cell(c) + 0.5 * (1.0 - nu) * slope;
        }
        const int c = k;
        if (c >= np) return 0.0;
        if (scheme_ == TransportScheme::Upwind1) return cell(c);
        const double slope = minmod(cell(c) - cell(c - 1), cell(c + 1) - cell(c));
        return cell(c) - 0.5 * (1.0 - nu) * slope;
    }

    PhaseGrid grid_;
    TransportScheme scheme_;
    Eigen::VectorXd a_, b_, v_, w_;
    Eigen::VectorXd a_face_, b_face_;
};

/// Implicit (backward Euler) momentum-space collision solve per x-column,
/// zero-flux boundaries at the momentum cutoff.
class CollisionOperator {
public:
    CollisionOperator(const PhaseGrid& grid,
                      CollisionWeights weights = CollisionWeights::ChangCooper)
        : grid_(grid), weights_(weights) {
        if (grid.n_p < 2) throw std::invalid_argument("CollisionOperator: need n_p >= 2");
        const int np = grid.n_p;
        b_.resize(np);
        e0_.resize(np);
        for (int j = 0; j < np; ++j) {
            e0_[j] = energy1d(grid.p_center(j));
            b_[j] = std::exp(-e0_[j]);
        }
        d_face_.resize(np + 1);
        p_face_.resize(np + 1);
        bhat_face_.resize(np + 1);
        for (int k = 0; k <= np; ++k) {
            const double pf = grid.p_face(k);
            p_face_[k] = pf;
            d_face_[k] = energy1d(pf);
            if (k == 0 || k == np) {
                bhat_face_[k] = 0.0;
                continue;
            }
            // Logarithmic mean of the Juttner weights of the two adjacent
            // cells: the exponential-fitting (Chang-Cooper) face weight.
            const double delta = e0_[k] - e0_[k - 1];
            bhat_face_[k] = std::abs(delta) < 1e-12 ? 0.5 * (b_[k - 1] + b_[k])
                                                    : (b_[k - 1] - b_[k]) / delta;
        }
    }

    void apply(DistributionField& f, double dt, int threads = 1) const {
        if (weights_ == CollisionWeights::ChangCooper)
            apply_chang_cooper(f, dt, threads);
        else
            apply_centered(f, dt, threads);
    }

private:
    // One LU factorization shared by every column (the matrix does not
    // depend on x), then a substitution pass per column.
    struct TridiagFactors {
        Eigen::VectorXd diag;  // eliminated diagonal
        Eigen::VectorXd mult;  // forward-elimination multipliers
        Eigen::VectorXd upper;
    };

    static TridiagFactors factorize(const Eigen::VectorXd& lower, Eigen::VectorXd diag,
                                    Eigen::VectorXd upper) {
        const int n = static_cast<int>(diag.size());
        TridiagFactors fac;
        fac.mult = Eigen::VectorXd::Zero(n);
        for (int j = 1; j < n; ++j) {
            if (diag[j - 1] == 0.0)
                throw std::runtime_error("collision solve failed: zero pivot in tridiagonal system");
            fac.mult[j] = lower[j] / diag[j - 1];
            diag[j] -= fac.mult[j] * upper[j - 1];
        }
        if (diag[n - 1] == 0.0)
            throw std::runtime_error("collision solve failed: zero pivot in tridiagonal system");
        fac.diag = std::move(diag);
        fac.upper = std::move(upper);
        return fac;
    }

    static void substitute(const TridiagFactors& fac, Eigen::VectorXd& rhs) {
        const int n = static_cast<int>(rhs.size());
        for (int j = 1; j < n; ++j) rhs[j] -= fac.mult[j] * rhs[j - 1];
        rhs[n - 1] /= fac.diag[n - 1];
        for (int j = n - 2; j >= 0; --j)
            rhs[j] = (rhs[j] - fac.upper[j] * rhs[j + 1]) / fac.diag[j];
    }

    // Flux in ratio form: Phi_k = D_k bhat_k (g_k - g_{k-1}) / dp with
    // g = f / b. Backward Euler gives a symmetric positive-definite
    // tridiagonal system in g for every column.
    void apply_chang_cooper(DistributionField& f, double dt, int threads) const {
        const int np = grid_.n_p;
        const double dp = grid_.dp();
        Eigen::VectorXd c(np + 1);
        for (int k = 0; k <= np; ++k) c[k] = dt / (dp * dp) * d_face_[k] * bhat_face_[k];
        Eigen::VectorXd diag(np), lower(np), upper(np);
        for (int j = 0; j < np; ++j) {
            diag[j] = b_[j] + c[j] + c[j + 1];
            lower[j] = -c[j];
            upper[j] = -c[j + 1];
        }
        const TridiagFactors fac = factorize(lower, std::move(diag), std::move(upper));

        parallel_for(0, grid_.n_x, threads, [&](int i) {
            Eigen::VectorXd rhs = f.values.col(i).matrix();
            substitute(fac, rhs);
            for (int j = 0; j < np; ++j) f.values(j, i) = b_[j] * rhs[j];
        });
    }

    // Centered weighting, kept as the non-equilibrium-preserving reference:
    // Phi_k = D_k (f_k - f_{k-1})/dp + p_k (f_k + f_{k-1})/2.
    void apply_centered(DistributionField& f, double dt, int threads) const {
        const int np = grid_.n_p;
        const double dp = grid_.dp();
        Eigen::VectorXd alpha(np + 1), beta(np + 1);
        for (int k = 0; k <= np; ++k) {
            if (k == 0 || k == np) {
                alpha[k] = beta[k] = 0.0;
                continue;
            }
            alpha[k] = -d_face_[k] / dp + 0.5 * p_face_[k];
            beta[k] = d_face_[k] / dp + 0.5 * p_face_[k];
        }
        Eigen::VectorXd diag(np), lower(np), upper(np);
        for (int j = 0; j < np; ++j) {
            diag[j] = 1.0 - dt / dp * (alpha[j + 1] - beta[j]);
            lower[j] = dt / dp * alpha[j];
            upper[j] = -dt / dp * beta[j + 1];
        }
        const TridiagFactors fac = factorize(lower, std::move(diag), std::move(upper));

        parallel_for(0, grid_.n_x, threads, [&](int i) {
            Eigen::VectorXd rhs = f.values.col(i).matrix();
            substitute(fac, rhs);
            for (int j = 0; j < np; ++j) f.values(j, i) = rhs[j];
        });
    }

    PhaseGrid grid_;
    CollisionWeights weights_;
    Eigen::VectorXd b_, e0_, d_face_, p_face_, bhat_face_;
};

/// Discrete static solution m_M = (M/Theta) e^{-p0 - V} normalized so that
/// mass(result) = M on the given grid.
inline DistributionField steady_state_linear(double M, const ExternalPotential& V,
                                             const PhaseGrid& grid) {
    if (!(M > 0.0)) throw std::invalid_argument("steady_state_linear: M must be > 0");
    DistributionField f(grid);
    Eigen::VectorXd a(grid.n_x), b(grid.n_p);
    for (int i = 0; i < grid.n_x; ++i) a[i] = std::exp(-V.value(grid.x_center(i)));
    for (int j = 0; j < grid.n_p; ++j) b[j] = std::exp(-energy1d(grid.p_center(j)));
    double theta = 0.0;
    for (int i = 0; i < grid.n_x; ++i)
        for (int j = 0; j < grid.n_p; ++j) theta += a[i] * b[j];
    theta *= grid.cell_measure();
    if (!std::isfinite(theta) || theta <= 0.0)
        throw std::runtime_error("steady_state_linear: normalization Theta is zero or not finite"
                                 " (potential not confining on this grid)");
    const double scale = M / theta;
    for (int i = 0; i < grid.n_x; ++i)
        for (int j = 0; j < grid.n_p; ++j) f.values(j, i) = scale * (a[i] * b[j]);
    return f;
}

/// Owns the cached operators for one (grid, potential, config) triple.
class Solver {
public:
    Solver(const PhaseGrid& grid, const ExternalPotential& V, const SolverConfig& config)
        : grid_(grid), config_(config),
          transport_(grid, V, config.transport_scheme, config.transport_speed_scale),
          collision_(grid, config.collision_weights) {
        if (!(config.dt > 0.0)) throw std::invalid_argument("SolverConfig: dt must be > 0");
        if (auto err = transport_.check_dt(config.dt, config.cfl_transport))
            throw std::runtime_error(*err);
    }

    const TransportOperator& transport() const { return transport_; }
    const CollisionOperator& collision() const { return collision_; }
    const SolverConfig& config() const { return config_; }

    void step(SolverState& state) const {
        const double dt = config_.dt;
        const int threads = config_.threads;
        if (config_.splitting == Splitting::Strang && config_.collisions_enabled) {
            transport_.apply(state.f, 0.5 * dt, threads);
            collision_.apply(state.f, dt, threads);
            transport_.apply(state.f, 0.5 * dt, threads);
        } else {
            transport_.apply(state.f, dt, threads);
            if (config_.collisions_enabled) collision_.apply(state.f, dt, threads);
        }
        state.t += dt;
        ++state.step_count;
        if (state.on_step) state.on_step(state);
    }

    void run(SolverState& state) const {
        const long n_steps = std::lround(config_.t_end / config_.dt);
        for (long n = 0; n < n_steps; ++n) step(state);
    }

private:
    PhaseGrid grid_;
    SolverConfig config_;
    TransportOperator transport_;
    CollisionOperator collision_;
};

/// One-shot transport update (builds the operator on the fly).
inline DistributionField transport_step(const DistributionField& f, const ExternalPotential& V,
                                        double dt,
                                        TransportScheme scheme = TransportScheme::MusclMinmod,
                                        double cfl_limit = 0.45, double speed_scale = 1.0) {
    TransportOperator op(f.grid, V, scheme, speed_scale);
    if (auto err = op.check_dt(dt, cfl_limit)) throw std::runtime_error(*err);
    DistributionField out = f;
    op.apply(out, dt);
    return out;
}

/// One-shot implicit collision update.
inline DistributionField collision_step(const DistributionField& f, double dt,
                                        CollisionWeights weights = CollisionWeights::ChangCooper) {
    CollisionOperator op(f.grid, weights);
    DistributionField out = f;
    op.apply(out, dt);
    return out;
}

} // namespace relfp
