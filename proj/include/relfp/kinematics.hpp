#pragma once

// Closed-form pointwise quantities on the unit-mass shell p0 = sqrt(1+|p|^2):
// energy, velocity, hyperbolic metric, diffusion matrix, Juttner weight and
// the Lorentz / Galilean boosts. Natural units (mass = c = 1), dimension is
// a runtime property of the argument vectors, d in {1,2,3}.

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace relfp {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Spacetime sample point (t, x, p); x and p must have the same dimension.
struct PhaseEvent {
    double t = 0.0;
    Vec x;
    Vec p;
};

struct MetricSample {
    Mat h;        // h_ij = delta_ij - \hat p_i \hat p_j
    Mat h_inv;    // (h^-1)^ij = delta^ij + p^i p^j
    double det_h; // (1+|p|^2)^-1
};

struct DiffusionMatrixSample {
    Mat D; // (I + p p^T) / sqrt(1+|p|^2), symmetric positive definite
};

inline void check_dim(const Vec& p) {
    if (p.size() < 1 || p.size() > 3)
        throw std::invalid_argument("momentum dimension must be 1, 2 or 3");
}

/// p0 = sqrt(1 + |p|^2) >= 1.
inline double energy(const Vec& p) {
    check_dim(p);
    return std::sqrt(1.0 + p.squaredNorm());
}

inline double energy1d(double p) { return std::sqrt(1.0 + p * p); }

/// \hat p = p / p0, strictly inside the unit ball.
inline Vec rel_velocity(const Vec& p) {
    return p / energy(p);
}

inline double rel_velocity1d(double p) { return p / energy1d(p); }

inline DiffusionMatrixSample diffusion_matrix(const Vec& p) {
    check_dim(p);
    const auto d = p.size();
    DiffusionMatrixSample s;
    s.D = (Mat::Identity(d, d) + p * p.transpose()) / energy(p);
    return s;
}

inline MetricSample hyperbolic_metric(const Vec& p) {
    check_dim(p);
    const auto d = p.size();
    const Vec ph = rel_velocity(p);
    MetricSample s;
    s.h = Mat::Identity(d, d) - ph * ph.transpose();
    s.h_inv = Mat::Identity(d, d) + p * p.transpose();
    s.det_h = 1.0 / (1.0 + p.squaredNorm());
    return s;
}

/// Juttner weight exp(-gamma * p0). gamma > 0.
inline double juttner(const Vec& p, double gamma = 1.0) {
    if (!(gamma > 0.0)) throw std::invalid_argument("juttner: gamma must be > 0");
    return std::exp(-gamma * energy(p));
}

inline double juttner1d(double p, double gamma = 1.0) {
    return std::exp(-gamma * energy1d(p));
}

// (u0 - 1)/|u|^2 has a removable singularity at u = 0; below |u| = 1e-4 the
// series 1/2 - |u|^2/8 is exact to machine precision, above it the algebraic
// form 1/(1 + u0) avoids the cancellation in u0 - 1.
inline double boost_projection_factor(double u_sq, double u0) {
    if (u_sq < 1e-8) return 0.5 - u_sq / 8.0;
    return 1.0 / (1.0 + u0);
}

/// Lorentz boost of an event (t, x, p) with boost parameter u (any finite u).
inline PhaseEvent lorentz_boost(const Vec& u, const PhaseEvent& ev) {
    check_dim(u);
    if (u.size() != ev.x.size() || u.size() != ev.p.size())
        throw std::invalid_argument("lorentz_boost: dimension mismatch");
    const double u_sq = u.squaredNorm();
    const double u0 = std::sqrt(1.0 + u_sq);
    const double kappa = boost_projection_factor(u_sq, u0);
    PhaseEvent out;
    out.t = u0 * ev.t - u.dot(ev.x);
    out.x = ev.x - u * ev.t + kappa * u * u.dot(ev.x);
    out.p = ev.p - u * energy(ev.p) + kappa * u * u.dot(ev.p);
    return out;
}

/// Galilean boost: (t, x - u t, p - u).
inline PhaseEvent galilean_boost(const Vec& u, const PhaseEvent& ev) {
    if (u.size() != ev.x.size() || u.size() != ev.p.size())
        throw std::invalid_argument("galilean_boost: dimension mismatch");
    return PhaseEvent{ev.t, ev.x - u * ev.t, ev.p - u};
}

} // namespace relfp
