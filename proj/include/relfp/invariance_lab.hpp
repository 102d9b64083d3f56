#pragma once

// Numerical verification of the frame invariances: the frictionless
// relativistic operator against Lorentz boosts, the frictionless classical
// operator against Galilean boosts, and the breakdown of both once friction
// is switched on. Everything is evaluated pointwise on closed-form test
// functions with central differences and Richardson extrapolation.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "relfp/kinematics.hpp"

namespace relfp {

using PhaseFunction = std::function<double(double, const Vec&, const Vec&)>;

/// Drifting Gaussian in (x, p), optionally modulated by a linear factor.
struct PhaseGaussian {
    double amplitude = 1.0;
    double alpha = 0.5; // x falloff
    double beta_w = 0.5; // p falloff
    Vec x0, p0, drift;
    Vec poly; // empty, or per-component linear modulation 1 + poly . (x + p)

    double operator()(double t, const Vec& x, const Vec& p) const {
        const Vec dx = x - x0 - drift * t;
        const Vec dp = p - p0;
        double value = amplitude * std::exp(-alpha * dx.squaredNorm() - beta_w * dp.squaredNorm());
        if (poly.size() == x.size()) value *= 1.0 + poly.dot(x + p);
        return value;
    }

    static PhaseGaussian standard(int d) {
        PhaseGaussian g;
        g.x0 = Vec::Zero(d);
        g.p0 = Vec::Zero(d);
        g.drift = Vec::Constant(d, 0.1);
        return g;
    }
};

namespace fd {

inline double d_time(const PhaseFunction& f, double t, const Vec& x, const Vec& p, double h) {
    return (f(t + h, x, p) - f(t - h, x, p)) / (2.0 * h);
}

inline double d_space(const PhaseFunction& f, double t, const Vec& x, const Vec& p, int i,
                      double h) {
    Vec xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    return (f(t, xp, p) - f(t, xm, p)) / (2.0 * h);
}

inline double d_momentum(const PhaseFunction& f, double t, const Vec& x, const Vec& p, int i,
                         double h) {
    Vec pp = p, pm = p;
    pp[i] += h;
    pm[i] -= h;
    return (f(t, x, pp) - f(t, x, pm)) / (2.0 * h);
}

} // namespace fd

/// LHS - RHS of the relativistic equation
/// d_t f + \hat p . grad_x f = d_{p_i}(beta f p^i + D^{ij} d_{p_j} f)
/// at a single step size h.
inline double relativistic_residual_raw(const PhaseFunction& f, double t, const Vec& x,
                                        const Vec& p, double beta, double h) {
    const auto d = p.size();
    const Vec phat = rel_velocity(p);
    double lhs = fd::d_time(f, t, x, p, h);
    for (int i = 0; i < d; ++i) lhs += phat[i] * fd::d_space(f, t, x, p, i, h);

    auto flux_component = [&](int i, const Vec& q) {
        const Mat D = diffusion_matrix(q).D;
        double flux = beta * q[i] * f(t, x, q);
        for (int j = 0; j < d; ++j) flux += D(i, j) * fd::d_momentum(f, t, x, q, j, h);
        return flux;
    };
    double rhs = 0.0;
    for (int i = 0; i < d; ++i) {
        Vec qp = p, qm = p;
        qp[i] += h;
        qm[i] -= h;
        rhs += (flux_component(i, qp) - flux_component(i, qm)) / (2.0 * h);
    }
    return lhs - rhs;
}

/// Same for the final equation with an external potential,
/// d_t f + \hat p . grad_x f - grad V . grad_p f = d_p(D grad_p f + p f).
inline double fprfin_residual_raw(const PhaseFunction& f,
                                  const std::function<Vec(const Vec&)>& grad_V, double t,
                                  const Vec& x, const Vec& p, double h) {
    double res = relativistic_residual_raw(f, t, x, p, 1.0, h);
    const Vec gv = grad_V(x);
    for (int i = 0; i < p.size(); ++i) res -= gv[i] * fd::d_momentum(f, t, x, p, i, h);
    return res;
}

/// LHS - RHS of the classical equation
/// d_t f + p . grad_x f = d_{p_i}(beta p^i f + d_{p_i} f).
inline double classical_residual_raw(const PhaseFunction& f, double t, const Vec& x, const Vec& p,
                                     double beta, double h) {
    const auto d = p.size();
    double lhs = fd::d_time(f, t, x, p, h);
    for (int i = 0; i < d; ++i) lhs += p[i] * fd::d_space(f, t, x, p, i, h);

    auto flux_component = [&](int i, const Vec& q) {
        return beta * q[i] * f(t, x, q) + fd::d_momentum(f, t, x, q, i, h);
    };
    double rhs = 0.0;
    for (int i = 0; i < d; ++i) {
        Vec qp = p, qm = p;
        qp[i] += h;
        qm[i] -= h;
        rhs += (flux_component(i, qp) - flux_component(i, qm)) / (2.0 * h);
    }
    return lhs - rhs;
}

template <typename Raw>
double richardson(const Raw& raw, double h) {
    return (4.0 * raw(0.5 * h) - raw(h)) / 3.0;
}

/// Richardson-extrapolated residual of the relativistic operator.
inline double relativistic_operator_residual(const PhaseFunction& f, double t, const Vec& x,
                                             const Vec& p, double beta, double h = 1e-3) {
    return richardson([&](double hh) { return relativistic_residual_raw(f, t, x, p, beta, hh); },
                      h);
}

inline double fprfin_operator_residual(const PhaseFunction& f,
                                       const std::function<Vec(const Vec&)>& grad_V, double t,
                                       const Vec& x, const Vec& p, double h = 1e-3) {
    return richardson([&](double hh) { return fprfin_residual_raw(f, grad_V, t, x, p, hh); }, h);
}

inline double classical_operator_residual(const PhaseFunction& f, double t, const Vec& x,
                                          const Vec& p, double beta, double h = 1e-3) {
    return richardson([&](double hh) { return classical_residual_raw(f, t, x, p, beta, hh); }, h);
}

struct InvarianceSample {
    double t;
    Vec x, p;
    double r_original = 0.0;
    double r_boosted = 0.0;
    double difference = 0.0; // |w r_original - r_boosted| with the p0 weight
};

/// Compare the residual of f at each point with the residual of the boosted
/// function at the boosted point. The two transport forms differ by a p0
/// factor, so the comparison carries the weight w = p0(p)/p0(p_boosted).
inline std::vector<InvarianceSample> lorentz_invariance_residual(
    const Vec& u, const PhaseFunction& f, const std::vector<PhaseEvent>& points, double beta = 0.0,
    double h = 1e-3) {
    PhaseFunction f_boosted = [&u, &f](double t, const Vec& x, const Vec& p) {
        const PhaseEvent back = lorentz_boost(-u, PhaseEvent{t, x, p});
        return f(back.t, back.x, back.p);
    };
    std::vector<InvarianceSample> out;
    out.reserve(points.size());
    for (const auto& ev : points) {
        InvarianceSample s{ev.t, ev.x, ev.p, 0.0, 0.0, 0.0};
        s.r_original = relativistic_operator_residual(f, ev.t, ev.x, ev.p, beta, h);
        const PhaseEvent boosted = lorentz_boost(u, ev);
        s.r_boosted =
            relativistic_operator_residual(f_boosted, boosted.t, boosted.x, boosted.p, beta, h);
        const double w = energy(ev.p) / energy(boosted.p);
        s.difference = std::abs(w * s.r_original - s.r_boosted);
        out.push_back(std::move(s));
    }
    return out;
}

/// Galilean version for the classical operator; the residuals agree with
/// weight one.
inline std::vector<InvarianceSample> galilean_invariance_residual(
    const Vec& u, const PhaseFunction& f, const std::vector<PhaseEvent>& points, double beta = 0.0,
    double h = 1e-3) {
    PhaseFunction f_boosted = [&u, &f](double t, const Vec& x, const Vec& p) {
        const PhaseEvent back = galilean_boost(-u, PhaseEvent{t, x, p});
        return f(back.t, back.x, back.p);
    };
    std::vector<InvarianceSample> out;
    out.reserve(points.size());
    for (const auto& ev : points) {
        InvarianceSample s{ev.t, ev.x, ev.p, 0.0, 0.0, 0.0};
        s.r_original = classical_operator_residual(f, ev.t, ev.x, ev.p, beta, h);
        const PhaseEvent boosted = galilean_boost(u, ev);
        s.r_boosted =
            classical_operator_residual(f_boosted, boosted.t, boosted.x, boosted.p, beta, h);
        s.difference = std::abs(s.r_original - s.r_boosted);
        out.push_back(std::move(s));
    }
    return out;
}

/// Deterministic sample points in the ball |x|, |p| <= radius.
inline std::vector<PhaseEvent> sample_points(int count, int d, unsigned seed,
                                             double radius = 1.5) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::vector<PhaseEvent> pts;
    pts.reserve(count);
    while (static_cast<int>(pts.size()) < count) {
        Vec x(d), p(d);
        for (int i = 0; i < d; ++i) {
            x[i] = uni(rng) * radius;
            p[i] = uni(rng) * radius;
        }
        if (x.norm() > radius || p.norm() > radius) continue;
        pts.push_back(PhaseEvent{0.3 * uni(rng), x, p});
    }
    return pts;
}

} // namespace relfp
