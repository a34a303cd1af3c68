// bcf.cpp - Ohmic-family spectral densities and exact bath correlation functions

#include "hopskit/bcf.hpp"

#include <algorithm>
#include <cmath>

#include "hopskit/quadrature.hpp"

namespace hops {

OhmicSpectralDensity OhmicSpectralDensity::make(double s, double omega_c, double alpha) {
    if (!(s > 0.0)) throw DomainError("spectral density requires s > 0");
    if (!(omega_c > 0.0)) throw DomainError("spectral density requires omega_c > 0");
    if (!(alpha >= 0.0)) throw DomainError("spectral density requires alpha >= 0");
    return OhmicSpectralDensity{s, omega_c, alpha};
}

double OhmicSpectralDensity::operator()(double omega) const noexcept {
    if (omega <= 0.0) return 0.0;
    return 0.5 * kPi * alpha * std::pow(omega_c, 1.0 - s) * std::pow(omega, s) *
           std::exp(-omega / omega_c);
}

double OhmicSpectralDensity::omega_max() const noexcept {
    return 40.0 * omega_c * std::max(1.0, s);
}

double SpectralValue::value() const {
    if (divergent_) throw DomainError("spectral value is divergent");
    return value_;
}

double bose(double x) noexcept { return 1.0 / std::expm1(x); }

double sd_value(const OhmicSpectralDensity& sd, double omega) {
    if (omega < 0.0) throw DomainError("sd_value: omega must be >= 0");
    return sd(omega);
}

cplx bcf_zero_temp(const OhmicSpectralDensity& sd, double tau) {
    const double pref = 0.5 * sd.alpha * sd.omega_c * sd.omega_c * std::tgamma(sd.s + 1.0);
    return pref / std::pow(cplx(1.0, sd.omega_c * tau), sd.s + 1.0);
}

namespace {

double thermal_scale(const OhmicSpectralDensity& sd, double beta) {
    return std::min(sd.omega_c, 1.0 / beta);
}

quad::Panels thermal_panels(const OhmicSpectralDensity& sd, double beta, double omega_max) {
    return {omega_max, thermal_scale(sd, beta), sd.omega_c, sd.s};
}

void require_beta(double beta, const char* who) {
    if (!(beta > 0.0)) throw DomainError(std::string(who) + ": beta must be > 0");
}

}  // namespace

double thermal_omega_max(const OhmicSpectralDensity& sd, double beta) {
    require_beta(beta, "thermal_omega_max");
    if (std::isinf(beta)) return 0.0;
    auto f = [&](double w) { return bose(beta * w) * sd(w); };
    return std::min(sd.omega_max(), quad::cutoff_frequency(f, thermal_scale(sd, beta)));
}

cplx bcf_full_temp(const OhmicSpectralDensity& sd, double beta, double tau) {
    require_beta(beta, "bcf_full_temp");
    if (std::isinf(beta)) return bcf_zero_temp(sd, tau);
    const double wmax = sd.omega_max();
    auto f_re = [&](double w) { return sd(w) / std::tanh(0.5 * beta * w); };
    auto f_im = [&](double w) { return sd(w); };
    const auto panels = thermal_panels(sd, beta, wmax);
    const double re = quad::oscillatory(f_re, tau, panels, quad::Oscillation::cosine);
    const double im = quad::oscillatory(f_im, tau, panels, quad::Oscillation::sine);
    return cplx(re, -im) / kPi;
}

cplx thermal_kernel(const OhmicSpectralDensity& sd, double beta, double tau) {
    require_beta(beta, "thermal_kernel");
    if (std::isinf(beta) || sd.alpha == 0.0) return 0.0;
    auto f = [&](double w) { return bose(beta * w) * sd(w); };
    return quad::fourier_half_line(f, tau, thermal_panels(sd, beta, thermal_omega_max(sd, beta))) /
           kPi;
}

double thermal_kernel_real(const OhmicSpectralDensity& sd, double beta, double tau) {
    require_beta(beta, "thermal_kernel_real");
    if (std::isinf(beta) || sd.alpha == 0.0) return 0.0;
    auto f = [&](double w) { return bose(beta * w) * sd(w); };
    return quad::oscillatory(f, tau, thermal_panels(sd, beta, thermal_omega_max(sd, beta)), quad::Oscillation::cosine) /
           kPi;
}

SpectralValue thermal_spectrum(const OhmicSpectralDensity& sd, double beta, double omega) {
    if (omega < 0.0) throw DomainError("thermal_spectrum: omega must be >= 0");
    require_beta(beta, "thermal_spectrum");
    if (std::isinf(beta)) return SpectralValue::finite(0.0);
    if (omega > 0.0) return SpectralValue::finite(bose(beta * omega) * sd(omega));
    // n̄(βω) → 1/(βω): limit of (π/2) α ω_c^{1-s} ω^{s-1} / β
    if (sd.s > 1.0 || sd.alpha == 0.0) return SpectralValue::finite(0.0);
    if (sd.s == 1.0) return SpectralValue::finite(0.5 * kPi * sd.alpha / beta);
    return SpectralValue::divergent();
}

SpectralValue pseudo_sd(const OhmicSpectralDensity& sd, double beta, double omega) {
    require_beta(beta, "pseudo_sd");
    if (omega == 0.0) {
        if (std::isinf(beta)) return SpectralValue::finite(0.0);
        return thermal_spectrum(sd, beta, 0.0);
    }
    if (std::isinf(beta)) return SpectralValue::finite(omega > 0.0 ? sd(omega) : 0.0);
    if (omega > 0.0) return SpectralValue::finite(sd(omega) / -std::expm1(-beta * omega));
    return SpectralValue::finite(sd(-omega) * bose(-beta * omega));
}

}  // namespace hops
