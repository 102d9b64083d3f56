#pragma once

// Adaptive Gauss-Legendre quadrature. Nodes and weights are generated once
// per order by Newton iteration on the Legendre polynomials; panels are
// bisected until the 32- vs 64-point estimates agree.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace relfp {

struct GaussRule {
    std::vector<double> nodes;   // on (-1, 1)
    std::vector<double> weights;
};

inline GaussRule gauss_legendre_rule(int n) {
    GaussRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        r.nodes[i] = -x;
        r.nodes[n - 1 - i] = x;
        r.weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
        r.weights[n - 1 - i] = r.weights[i];
    }
    return r;
}

inline double gauss_panel(const std::function<double(double)>& f, double a, double b,
                          const GaussRule& rule) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double sum = 0.0;
    for (size_t i = 0; i < rule.nodes.size(); ++i)
        sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return half * sum;
}

namespace detail {
inline double adaptive_rec(const std::function<double(double)>& f, double a, double b,
                           const GaussRule& lo, const GaussRule& hi, double tol, int depth) {
    const double coarse = gauss_panel(f, a, b, lo);
    const double fine = gauss_panel(f, a, b, hi);
    // Stop when the two estimates agree to the requested tolerance or to
    // rounding, whichever is coarser.
    const double limit = std::max(tol, 4e-16 * std::abs(fine));
    if (std::abs(fine - coarse) <= limit || depth >= 16) return fine;
    const double mid = 0.5 * (a + b);
    return adaptive_rec(f, a, mid, lo, hi, 0.5 * tol, depth + 1) +
           adaptive_rec(f, mid, b, lo, hi, 0.5 * tol, depth + 1);
}
} // namespace detail

/// Adaptive 64-point Gauss-Legendre integration of f over [a, b]; tol is an
/// absolute tolerance on the panel sum.
inline double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                 double tol = 1e-12) {
    if (!(b >= a)) throw std::invalid_argument("integrate_adaptive: b < a");
    static const GaussRule lo = gauss_legendre_rule(32);
    static const GaussRule hi = gauss_legendre_rule(64);
    return detail::adaptive_rec(f, a, b, lo, hi, tol, 0);
}

} // namespace relfp
