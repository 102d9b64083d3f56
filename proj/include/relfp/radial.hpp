#pragma once

// Spherically symmetric grids and the Newtonian radial Poisson solve
// -Delta U = g with U -> 0 at infinity:
//   U(r) = (1/r) int_0^r s^2 g(s) ds + int_r^inf s g(s) ds.

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace relfp {

struct RadialGrid {
    int n_r = 4096;
    double r_max = 12.0;

    RadialGrid() = default;
    RadialGrid(int n, double rmax) : n_r(n), r_max(rmax) {
        if (n_r < 8) throw std::invalid_argument("RadialGrid: need at least 8 cells");
        if (!(r_max > 0.0)) throw std::invalid_argument("RadialGrid: r_max must be > 0");
    }

    double dr() const { return r_max / n_r; }
    double r(int k) const { return (k + 0.5) * dr(); }
    double r_face(int k) const { return k * dr(); }
    double cell_volume(int k) const { return 4.0 * M_PI * r(k) * r(k) * dr(); }
};

enum class FarField { Decaying1OverR, Zero };

struct RadialField {
    RadialGrid grid;
    Eigen::VectorXd values;
    FarField far_field = FarField::Zero;

    RadialField() = default;
    explicit RadialField(const RadialGrid& g, FarField ff = FarField::Zero)
        : grid(g), values(Eigen::VectorXd::Zero(g.n_r)), far_field(ff) {}
};

inline double radial_integral(const RadialField& g) {
    double sum = 0.0;
    for (int k = 0; k < g.grid.n_r; ++k) sum += g.values[k] * g.grid.cell_volume(k);
    return sum;
}

/// Green-formula solution of -Delta U = g in spherical symmetry.
inline RadialField poisson_radial(const RadialField& g) {
    const int n = g.grid.n_r;
    const double dr = g.grid.dr();
    RadialField u(g.grid, FarField::Decaying1OverR);

    // Prefix sums of s^2 g and suffix sums of s g, midpoint panels with a
    // half-cell correction at the evaluation cell.
    Eigen::VectorXd inner(n), outer(n);
    double acc = 0.0;
    for (int k = 0; k < n; ++k) {
        const double s = g.grid.r(k);
        inner[k] = acc + 0.5 * s * s * g.values[k] * dr;
        acc += s * s * g.values[k] * dr;
    }
    acc = 0.0;
    for (int k = n - 1; k >= 0; --k) {
        const double s = g.grid.r(k);
        outer[k] = acc + 0.5 * s * g.values[k] * dr;
        acc += s * g.values[k] * dr;
    }
    for (int k = 0; k < n; ++k) u.values[k] = inner[k] / g.grid.r(k) + outer[k];
    return u;
}

/// Pointwise residual of -Delta U = g with the three-point radial stencil.
/// The flux difference is divided by the exact cell integral of r^2, which
/// keeps the stencil consistent down to the origin cell. The outer face
/// extrapolates U by the monopole law U ~ C/r.
inline Eigen::VectorXd radial_laplacian_residual(const RadialField& u, const RadialField& g) {
    const int n = u.grid.n_r;
    const double dr = u.grid.dr();
    Eigen::VectorXd res(n);
    for (int k = 0; k < n; ++k) {
        double flux_in = 0.0; // r^2 U' at the inner face; zero at r = 0
        if (k > 0) {
            const double rf = u.grid.r_face(k);
            flux_in = rf * rf * (u.values[k] - u.values[k - 1]) / dr;
        }
        double flux_out;
        const double rf = u.grid.r_face(k + 1);
        if (k + 1 < n) {
            flux_out = rf * rf * (u.values[k + 1] - u.values[k]) / dr;
        } else {
            const double ghost = u.values[n - 1] * u.grid.r(n - 1) / (u.grid.r(n - 1) + dr);
            flux_out = rf * rf * (ghost - u.values[n - 1]) / dr;
        }
        const double r_in = u.grid.r_face(k), r_out = u.grid.r_face(k + 1);
        const double r2_cell = (r_out * r_out * r_out - r_in * r_in * r_in) / 3.0;
        res[k] = -(flux_out - flux_in) / r2_cell - g.values[k];
    }
    return res;
}

/// sqrt(int res^2 4 pi r^2 dr).
inline double weighted_l2(const Eigen::VectorXd& values, const RadialGrid& grid) {
    double sum = 0.0;
    for (int k = 0; k < grid.n_r; ++k) sum += values[k] * values[k] * grid.cell_volume(k);
    return std::sqrt(sum);
}

} // namespace relfp
