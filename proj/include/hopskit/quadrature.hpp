// quadrature.hpp - adaptive integration helpers for spectral integrals

#pragma once

#include <functional>

#include "hopskit/types.hpp"

namespace hops::quad {

using RealFn = std::function<double(double)>;

inline constexpr double kDefaultRelTol = 1e-12;

// Adaptive Gauss-Kronrod on [a, b].
double integrate(const RealFn& f, double a, double b, double rel_tol = kDefaultRelTol);

// ∫_0^b f(ω) dω for integrands behaving like ω^{s-1} (or ω^s) at the origin.
// For s < 1 the substitution u = ω^s removes the endpoint singularity.
double integrate_from_zero(const RealFn& f, double b, double s, double rel_tol = kDefaultRelTol);

enum class Oscillation { cosine, sine };

// Panel layout for oscillatory integrals on [0, Ω]: panels start `fine` wide
// at the origin and double until `coarse`; no panel is wider than π/|τ|.
// The first panel uses integrate_from_zero, so ω^{s-1} behaviour at the
// origin is harmless.
struct Panels {
    double omega_max;
    double fine;
    double coarse;
    double s;
};

// ∫_0^Ω f(ω) cos(ωτ) dω or ∫_0^Ω f(ω) sin(ωτ) dω.
double oscillatory(const RealFn& f, double tau, const Panels& panels, Oscillation kind,
                   double rel_tol = kDefaultRelTol);

// ∫_0^Ω f(ω) e^{-iωτ} dω.
cplx fourier_half_line(const RealFn& f, double tau, const Panels& panels,
                       double rel_tol = kDefaultRelTol);

// Smallest ω beyond the maximum of f at which f drops below rel·max f and
// stays there (checked on a geometric grid up to 1e4·scale).
double cutoff_frequency(const RealFn& f, double scale, double rel = 1e-12);

// Cauchy principal value P∫_0^Ω f(x)/(c - x) dx for c > 0. f may carry
// an integrable x^{s-1} singularity at the origin.
double principal_value(const RealFn& f, double c, double omega_max, double rel_tol = 1e-10);

}  // namespace hops::quad
