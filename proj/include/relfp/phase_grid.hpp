#pragma once

// Phase-space discretization for the d = 1 kinetic solver: cell-centered
// uniform grids in x and p, midpoint quadrature, the sampled distribution
// function and its velocity moments.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "relfp/kinematics.hpp"

namespace relfp {

struct PhaseGrid {
    int n_x = 128;
    int n_p = 128;
    double x_min = -9.0;
    double x_max = 9.0;
    double p_max = 8.0; // momentum domain [-p_max, p_max]

    static constexpr int dim = 1;

    PhaseGrid() = default;
    PhaseGrid(int nx, int np, double xmin, double xmax, double pmax)
        : n_x(nx), n_p(np), x_min(xmin), x_max(xmax), p_max(pmax) {
        if (n_x < 1 || n_p < 1) throw std::invalid_argument("PhaseGrid: cell counts must be >= 1");
        if (!(x_max > x_min)) throw std::invalid_argument("PhaseGrid: x_max must exceed x_min");
        if (!(p_max > 0.0)) throw std::invalid_argument("PhaseGrid: p_max must be > 0");
    }

    double dx() const { return (x_max - x_min) / n_x; }
    double dp() const { return 2.0 * p_max / n_p; }

    // Centers written as offsets from the domain midpoint so that symmetric
    // domains produce exactly sign-symmetric coordinates.
    double x_center(int i) const { return 0.5 * (x_min + x_max) + (i - 0.5 * (n_x - 1)) * dx(); }
    double p_center(int j) const { return (j - 0.5 * (n_p - 1)) * dp(); }
    double x_face(int i) const { return 0.5 * (x_min + x_max) + (i - 0.5 * n_x) * dx(); }
    double p_face(int j) const { return (j - 0.5 * n_p) * dp(); }

    double cell_measure() const { return dx() * dp(); }
};

/// Sampled f(x, p) >= 0. Storage is (n_p, n_x) column-major so that the
/// momentum row of a fixed spatial cell is contiguous.
struct DistributionField {
    PhaseGrid grid;
    Eigen::ArrayXXd values; // (n_p, n_x)

    DistributionField() = default;
    explicit DistributionField(const PhaseGrid& g)
        : grid(g), values(Eigen::ArrayXXd::Zero(g.n_p, g.n_x)) {}

    double& at(int ix, int jp) { return values(jp, ix); }
    double at(int ix, int jp) const { return values(jp, ix); }
};

/// External confining potential V(x) with gradient, plus built-ins.
class ExternalPotential {
public:
    enum class Kind { None, Harmonic, Quartic, Tabulated };

    ExternalPotential() = default;

    static ExternalPotential none() { return ExternalPotential(Kind::None); }
    static ExternalPotential harmonic() { return ExternalPotential(Kind::Harmonic); }
    static ExternalPotential quartic() { return ExternalPotential(Kind::Quartic); }
    static ExternalPotential tabulated(std::vector<double> xs, std::vector<double> vs) {
        if (xs.size() != vs.size() || xs.size() < 2)
            throw std::invalid_argument("tabulated potential needs >= 2 matching samples");
        ExternalPotential p(Kind::Tabulated);
        p.xs_ = std::move(xs);
        p.vs_ = std::move(vs);
        return p;
    }

    Kind kind() const { return kind_; }

    double value(double x) const {
        switch (kind_) {
            case Kind::None: return 0.0;
            case Kind::Harmonic: return 0.5 * x * x;
            case Kind::Quartic: return 0.25 * x * x * x * x;
            case Kind::Tabulated: return interp(x);
        }
        return 0.0;
    }

    double grad(double x) const {
        switch (kind_) {
            case Kind::None: return 0.0;
            case Kind::Harmonic: return x;
            case Kind::Quartic: return x * x * x;
            case Kind::Tabulated: {
                const double h = span() * 1e-6;
                return (interp(x + h) - interp(x - h)) / (2.0 * h);
            }
        }
        return 0.0;
    }

    /// Largest boundary value of e^{-V} on the grid extent; the caller decides
    /// whether that is confined enough for the scenario at hand.
    double boundary_weight(const PhaseGrid& g) const {
        return std::max(std::exp(-value(g.x_min)), std::exp(-value(g.x_max)));
    }

private:
    explicit ExternalPotential(Kind k) : kind_(k) {}

    double span() const { return xs_.back() - xs_.front(); }

    double interp(double x) const {
        if (x <= xs_.front()) return vs_.front();
        if (x >= xs_.back()) return vs_.back();
        auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
        const size_t k = it - xs_.begin();
        const double t = (x - xs_[k - 1]) / (xs_[k] - xs_[k - 1]);
        return (1.0 - t) * vs_[k - 1] + t * vs_[k];
    }

    Kind kind_ = Kind::None;
    std::vector<double> xs_, vs_;
};

/// rho(x_i) = sum_j f_ij dp.
inline Eigen::VectorXd density(const DistributionField& f) {
    const double dp = f.grid.dp();
    Eigen::VectorXd rho(f.grid.n_x);
    for (int i = 0; i < f.grid.n_x; ++i) rho[i] = f.values.col(i).sum() * dp;
    return rho;
}

/// j(x_i) = sum_j \hat p(p_j) f_ij dp; satisfies |j| <= rho cellwise.
inline Eigen::VectorXd current(const DistributionField& f) {
    const double dp = f.grid.dp();
    Eigen::VectorXd j(f.grid.n_x);
    for (int i = 0; i < f.grid.n_x; ++i) {
        double s = 0.0;
        for (int jp = 0; jp < f.grid.n_p; ++jp)
            s += rel_velocity1d(f.grid.p_center(jp)) * f.values(jp, i);
        j[i] = s * dp;
    }
    return j;
}

/// Full phase-space midpoint quadrature of f.
inline double mass(const DistributionField& f) {
    return f.values.sum() * f.grid.cell_measure();
}

} // namespace relfp
