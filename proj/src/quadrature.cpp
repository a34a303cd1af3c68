// quadrature.cpp - adaptive integration helpers for spectral integrals

#include "hopskit/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace hops::quad {

namespace {

constexpr unsigned kMaxDepth = 12;

using GK = boost::math::quadrature::gauss_kronrod<double, 31>;

// Adaptive bisection against an absolute error target; boost's own adaptive
// driver measures tolerance against each subinterval's value, which never
// terminates on panels where an oscillating integrand cancels.
double integrate_abs(const RealFn& f, double a, double b, double abs_tol, unsigned depth = kMaxDepth) {
    double err = 0.0;
    const double r = GK::integrate(f, a, b, 0, 0.0, &err);
    if (err <= abs_tol || depth == 0) return r;
    const double mid = 0.5 * (a + b);
    return integrate_abs(f, a, mid, 0.5 * abs_tol, depth - 1) +
           integrate_abs(f, mid, b, 0.5 * abs_tol, depth - 1);
}

// ∫_0^b f with the u = ω^s substitution for s < 1, as a plain integrand on [0, b'].
std::pair<RealFn, double> regularized_origin(const RealFn& f, double b, double s) {
    if (s >= 1.0) return {f, b};
    const double inv_s = 1.0 / s;
    RealFn g = [f, inv_s](double u) {
        if (u <= 0.0) return 0.0;
        const double w = std::pow(u, inv_s);
        return f(w) * inv_s * std::pow(u, inv_s - 1.0);
    };
    return {g, std::pow(b, s)};
}

}  // namespace

double integrate(const RealFn& f, double a, double b, double rel_tol) {
    if (!(b > a)) return 0.0;
    return GK::integrate(f, a, b, kMaxDepth, rel_tol);
}

double integrate_from_zero(const RealFn& f, double b, double s, double rel_tol) {
    if (!(b > 0.0)) return 0.0;
    // ω = u^{1/s}, dω = (1/s) u^{1/s - 1} du
    const auto [g, bu] = regularized_origin(f, b, s);
    return integrate(g, 0.0, bu, rel_tol);
}

double oscillatory(const RealFn& f, double tau, const Panels& panels, Oscillation kind,
                   double rel_tol) {
    const double wmax = panels.omega_max;
    if (!(wmax > 0.0)) return 0.0;
    if (kind == Oscillation::sine && tau == 0.0) return 0.0;
    const double cap = tau != 0.0 ? kPi / std::abs(tau) : std::numeric_limits<double>::infinity();
    const double coarse = std::min(panels.coarse, cap);
    double width = std::min({panels.fine, coarse, wmax});

    RealFn g;
    if (kind == Oscillation::cosine)
        g = [&](double w) { return f(w) * std::cos(w * tau); };
    else
        g = [&](double w) { return f(w) * std::sin(w * tau); };

    // panel edges: first panel from the origin, then doubling widths up to `coarse`
    std::vector<double> edges{0.0, width};
    while (edges.back() < wmax) {
        width = std::min(2.0 * width, coarse);
        edges.push_back(std::min(edges.back() + width, wmax));
    }
    const auto [g0, b0] = regularized_origin(g, edges[1], panels.s);

    // absolute target from the L1 norm of the integrand over the whole range
    double l1 = 0.0;
    for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
        double panel_l1 = 0.0;
        if (k == 0)
            GK::integrate(g0, 0.0, b0, 0, 0.0, nullptr, &panel_l1);
        else
            GK::integrate(g, edges[k], edges[k + 1], 0, 0.0, nullptr, &panel_l1);
        l1 += panel_l1;
    }
    if (l1 == 0.0) return 0.0;
    const double abs_tol = rel_tol * l1 / static_cast<double>(edges.size() - 1);

    double sum = integrate_abs(g0, 0.0, b0, abs_tol);
    for (std::size_t k = 1; k + 1 < edges.size(); ++k) sum += integrate_abs(g, edges[k], edges[k + 1], abs_tol);
    return sum;
}

cplx fourier_half_line(const RealFn& f, double tau, const Panels& panels, double rel_tol) {
    const double re = oscillatory(f, tau, panels, Oscillation::cosine, rel_tol);
    const double im = -oscillatory(f, tau, panels, Oscillation::sine, rel_tol);
    return {re, im};
}

double cutoff_frequency(const RealFn& f, double scale, double rel) {
    const double lo = scale * 1e-4;
    const double hi = scale * 1e4;
    const double factor = 1.02;
    double peak = 0.0;
    double w_peak = lo;
    for (double w = lo; w <= hi; w *= factor) {
        const double v = std::abs(f(w));
        if (v > peak) {
            peak = v;
            w_peak = w;
        }
    }
    if (peak == 0.0) return scale;
    double last_above = w_peak;
    for (double w = w_peak; w <= hi; w *= factor) {
        if (std::abs(f(w)) >= rel * peak) last_above = w;
    }
    return last_above * factor;
}

double principal_value(const RealFn& f, double c, double omega_max, double rel_tol) {
    if (!(c > 0.0)) throw DomainError("principal_value: pole must be positive");
    // Symmetric window [0, 2c] folded onto u ∈ (0, c): the 1/(c-x) part
    // integrates to zero there, leaving a regular integrand.
    auto folded = [&](double u) {
        if (u <= 0.0) return 0.0;
        return (f(c - u) - f(c + u)) / u;
    };
    boost::math::quadrature::tanh_sinh<double> ts;
    double result = ts.integrate(folded, 0.0, c, rel_tol);
    if (omega_max > 2.0 * c) {
        auto tail = [&](double x) { return f(x) / (c - x); };
        // Panels of width c keep the 1/(c-x) factor well resolved.
        double a = 2.0 * c;
        double width = std::max(c, 1e-3 * omega_max);
        while (a < omega_max) {
            const double b = std::min(a + width, omega_max);
            result += integrate(tail, a, b, rel_tol);
            a = b;
            width *= 1.5;
        }
    }
    return result;
}

}  // namespace hops::quad
