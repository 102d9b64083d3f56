#pragma once

// The functionals the equation conserves, dissipates or bounds: mass, free
// energy Q, its positive part, the entropy dissipation, the entropy-gap
// lower bound, the chi^2 divergence relative to the steady state, the
// continuity-equation residual and the light-cone support check.

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "relfp/kinematics.hpp"
#include "relfp/phase_grid.hpp"

namespace relfp {

struct DiagnosticRecord {
    double t = 0.0;
    double mass = 0.0;
    double free_energy = 0.0;
    double free_energy_plus = 0.0;
    double dissipation = 0.0;
    double chi2 = 0.0;
    double support_radius = 0.0;
};

struct DiagnosticSeries {
    std::vector<DiagnosticRecord> records;

    void append(const DiagnosticRecord& r) {
        if (!records.empty() && !(r.t > records.back().t))
            throw std::invalid_argument("DiagnosticSeries: time stamps must be strictly increasing");
        records.push_back(r);
    }
};

/// Q[f] = sum f (p0 + V + log f), with f log f := 0 at f = 0.
inline double free_energy(const DistributionField& f, const ExternalPotential& V) {
    double sum = 0.0;
    for (int i = 0; i < f.grid.n_x; ++i) {
        const double vx = V.value(f.grid.x_center(i));
        for (int j = 0; j < f.grid.n_p; ++j) {
            const double val = f.values(j, i);
            if (val <= 0.0) continue;
            sum += val * (energy1d(f.grid.p_center(j)) + vx + std::log(val));
        }
    }
    return sum * f.grid.cell_measure();
}

/// Q_+[f]: same with log^+ f = max(0, log f).
inline double free_energy_positive(const DistributionField& f, const ExternalPotential& V) {
    double sum = 0.0;
    for (int i = 0; i < f.grid.n_x; ++i) {
        const double vx = V.value(f.grid.x_center(i));
        for (int j = 0; j < f.grid.n_p; ++j) {
            const double val = f.values(j, i);
            if (val <= 0.0) continue;
            sum += val * (energy1d(f.grid.p_center(j)) + vx + std::max(0.0, std::log(val)));
        }
    }
    return sum * f.grid.cell_measure();
}

/// 4 sum D(p) (d/dp sqrt(f/J))^2 J over phase space, the sign-definite form
/// of the entropy production. The floor under f keeps the square root
/// defined where the field has been flushed to zero.
inline double entropy_dissipation(const DistributionField& f) {
    const int nx = f.grid.n_x, np = f.grid.n_p;
    const double dp = f.grid.dp();
    Eigen::VectorXd juttner_w(np), diffusion(np);
    for (int j = 0; j < np; ++j) {
        juttner_w[j] = std::exp(-energy1d(f.grid.p_center(j)));
        diffusion[j] = energy1d(f.grid.p_center(j)); // D(p) in d = 1
    }
    double sum = 0.0;
    Eigen::VectorXd s(np);
    for (int i = 0; i < nx; ++i) {
        for (int j = 0; j < np; ++j)
            s[j] = std::sqrt(std::max(f.values(j, i), 1e-300) / juttner_w[j]);
        for (int j = 0; j < np; ++j) {
            double ds;
            if (j == 0)
                ds = (s[1] - s[0]) / dp;
            else if (j == np - 1)
                ds = (s[np - 1] - s[np - 2]) / dp;
            else
                ds = (s[j + 1] - s[j - 1]) / (2.0 * dp);
            sum += diffusion[j] * ds * ds * juttner_w[j];
        }
    }
    return 4.0 * sum * f.grid.cell_measure();
}

/// (Q[f] - Q[m], 1/2 sum (sqrt f - sqrt m)^2); the first dominates the
/// second for mass-matched fields, with equality only at f = m.
inline std::pair<double, double> entropy_gap_lower_bound(const DistributionField& f,
                                                         const DistributionField& m,
                                                         const ExternalPotential& V) {
    const double mf = mass(f), mm = mass(m);
    if (std::abs(mf - mm) > 1e-8 * std::max({1.0, mf, mm}))
        throw std::invalid_argument("entropy_gap_lower_bound: fields must have equal mass");
    const double lhs = free_energy(f, V) - free_energy(m, V);
    double rhs = 0.0;
    for (int i = 0; i < f.grid.n_x; ++i)
        for (int j = 0; j < f.grid.n_p; ++j) {
            const double d = std::sqrt(std::max(f.values(j, i), 0.0)) -
                             std::sqrt(std::max(m.values(j, i), 0.0));
            rhs += d * d;
        }
    rhs *= 0.5 * f.grid.cell_measure();
    return {lhs, rhs};
}

/// sum (f/m)^2 m = sum f^2 / m; requires m > 0 on the grid.
inline double chi2_divergence(const DistributionField& f, const DistributionField& m) {
    if ((m.values <= 0.0).any())
        throw std::invalid_argument("chi2_divergence: reference state must be positive");
    return (f.values.square() / m.values).sum() * f.grid.cell_measure();
}

/// (rho_next - rho_prev)/dt + div((j_next + j_prev)/2) by centered
/// differences (one-sided at the two boundary cells).
inline Eigen::VectorXd continuity_residual(const DistributionField& f_prev,
                                           const DistributionField& f_next, double dt) {
    if (f_prev.grid.n_x != f_next.grid.n_x || f_prev.grid.n_p != f_next.grid.n_p)
        throw std::invalid_argument("continuity_residual: fields must share a grid");
    const int nx = f_prev.grid.n_x;
    const double dx = f_prev.grid.dx();
    Eigen::VectorXd rho_p = density(f_prev), rho_n = density(f_next);
    Eigen::VectorXd j_mid = 0.5 * (current(f_prev) + current(f_next));
    Eigen::VectorXd res(nx);
    for (int i = 0; i < nx; ++i) {
        double div;
        if (i == 0)
            div = (j_mid[1] - j_mid[0]) / dx;
        else if (i == nx - 1)
            div = (j_mid[nx - 1] - j_mid[nx - 2]) / dx;
        else
            div = (j_mid[i + 1] - j_mid[i - 1]) / (2.0 * dx);
        res[i] = (rho_n[i] - rho_p[i]) / dt + div;
    }
    return res;
}

/// Outer edge of the set of cells above threshold_rel * max f.
inline double support_radius(const DistributionField& f, double threshold_rel = 1e-14) {
    const double fmax = f.values.maxCoeff();
    if (!(fmax > 0.0)) return 0.0;
    const double thr = threshold_rel * fmax;
    double radius = 0.0;
    for (int i = 0; i < f.grid.n_x; ++i) {
        bool occupied = false;
        for (int j = 0; j < f.grid.n_p; ++j)
            if (f.values(j, i) > thr) {
                occupied = true;
                break;
            }
        if (occupied)
            radius = std::max(radius, std::abs(f.grid.x_center(i)) + 0.5 * f.grid.dx());
    }
    return radius;
}

struct LightconeResult {
    bool pass = false;
    double margin = 0.0; // min over snapshots of (R + t + dx - support_radius)
};

/// Support of every snapshot must stay inside |x| <= R + t + dx, with R the
/// support radius of the first snapshot.
inline LightconeResult lightcone_check(const std::vector<double>& times,
                                       const std::vector<DistributionField>& snapshots,
                                       double threshold_rel = 1e-14) {
    if (times.size() != snapshots.size() || times.empty())
        throw std::invalid_argument("lightcone_check: need matching, nonempty snapshot series");
    const double t0 = times.front();
    const double radius0 = support_radius(snapshots.front(), threshold_rel);
    const double dx = snapshots.front().grid.dx();
    LightconeResult result;
    result.margin = std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < times.size(); ++k) {
        const double allowed = radius0 + (times[k] - t0) + dx;
        result.margin = std::min(result.margin, allowed - support_radius(snapshots[k], threshold_rel));
    }
    result.pass = result.margin >= 0.0;
    return result;
}

} // namespace relfp
