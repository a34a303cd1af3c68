// bcf.hpp - Ohmic-family spectral densities and exact bath correlation functions

#pragma once

#include <limits>

#include "hopskit/types.hpp"

namespace hops {

// J(ω) = (π/2) α ω_c^{1-s} ω^s exp(-ω/ω_c)
struct OhmicSpectralDensity {
    double s{1.0};        // low-frequency exponent (sub-Ohmic < 1 < super-Ohmic)
    double omega_c{1.0};  // cutoff frequency
    double alpha{0.0};    // coupling strength

    static OhmicSpectralDensity make(double s, double omega_c, double alpha);

    // J(ω) without domain checks; ω ≥ 0 expected.
    double operator()(double omega) const noexcept;

    // Frequency beyond which J is below 1e-12 of its peak.
    double omega_max() const noexcept;

    bool operator==(const OhmicSpectralDensity&) const = default;
};

inline constexpr double kInfiniteBeta = std::numeric_limits<double>::infinity();

// A spectral quantity that is either finite or divergent (pseudo SD at ω = 0
// for s < 1). Divergence is a value, not an error.
class SpectralValue {
public:
    static SpectralValue finite(double v) { return SpectralValue(v, false); }
    static SpectralValue divergent() { return SpectralValue(std::numeric_limits<double>::infinity(), true); }

    bool is_divergent() const noexcept { return divergent_; }
    // Throws DomainError when divergent.
    double value() const;
    double value_or(double fallback) const noexcept { return divergent_ ? fallback : value_; }

private:
    SpectralValue(double v, bool d) : value_(v), divergent_(d) {}
    double value_;
    bool divergent_;
};

// Bose occupation n̄(x) = 1/(e^x - 1).
double bose(double x) noexcept;

double sd_value(const OhmicSpectralDensity& sd, double omega);

// α(τ) = α ω_c² Γ(s+1) / [2 (1 + iω_c τ)^{s+1}]
cplx bcf_zero_temp(const OhmicSpectralDensity& sd, double tau);

// (1/π)∫dω J(ω)[coth(βω/2) cos ωτ - i sin ωτ], by quadrature.
cplx bcf_full_temp(const OhmicSpectralDensity& sd, double beta, double tau);

// Autocorrelation of the thermal shift process: (1/π)∫dω n̄(βω) J(ω) e^{-iωτ}.
cplx thermal_kernel(const OhmicSpectralDensity& sd, double beta, double tau);

// Re of thermal_kernel alone (cosine transform only).
double thermal_kernel_real(const OhmicSpectralDensity& sd, double beta, double tau);

// n̄(βω) J(ω); the ω → 0 limit is reported as a SpectralValue.
SpectralValue thermal_spectrum(const OhmicSpectralDensity& sd, double beta, double omega);

// J̃(ω) = J(ω)/(1 - e^{-βω}) with J(-ω) := -J(ω). β may be kInfiniteBeta.
SpectralValue pseudo_sd(const OhmicSpectralDensity& sd, double beta, double omega);

// Upper integration limit for n̄(βω) J(ω).
double thermal_omega_max(const OhmicSpectralDensity& sd, double beta);

}  // namespace hops
