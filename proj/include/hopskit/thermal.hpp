// thermal.hpp - finite temperature as a stochastic Hermitian Hamiltonian shift

#pragma once

#include <cstdint>
#include <memory>
#include <optional>

#include "hopskit/bcf.hpp"
#include "hopskit/hops.hpp"
#include "hopskit/stocproc.hpp"

namespace hops {

struct ThermalConfig {
    double beta{kInfiniteBeta};  // kInfiniteBeta disables the thermal process
    double noise_abstol{1e-3};
    std::uint64_t seed_offset{0};

    // Throws DomainError unless beta > 0 and noise_abstol > 0.
    void validate() const;
    bool enabled() const noexcept { return !std::isinf(beta); }
};

// Plan for y(t) with ⟨y(t)y*(s)⟩ = (1/π)∫dω n̄(βω)J(ω)e^{-iω(t-s)}; null when disabled.
std::shared_ptr<const NoisePlan> make_thermal_plan(const OhmicSpectralDensity& sd, const ThermalConfig& cfg,
                                                   double t_max);

// One realization of y(t); nullopt when the thermal process is disabled (y ≡ 0).
std::optional<StochasticProcess> make_thermal_process(const OhmicSpectralDensity& sd, const ThermalConfig& cfg,
                                                      double t_max, std::uint64_t seed, std::uint64_t stream = 0);

// H_S + L† y + L y*.
CMatrix shifted_hamiltonian(const SystemModel& model, cplx y);

// The additive part L† y(t) + L y*(t) for propagate_trajectory.
HamiltonianShift thermal_shift(const SystemModel& model, std::shared_ptr<const StochasticProcess> y);

// ⟨f(t)f(s)⟩ for f = 2 Re y: (2/π)∫dω n̄(βω)J(ω)cos(ωτ).
double thermal_force_autocorrelation(const OhmicSpectralDensity& sd, double beta, double tau);

// Noise whose correlation is the full finite-temperature kernel, built from
// processes with one-sided spectra: z = z₀ + y₁ + y₂*.
NoiseFn full_temperature_noise(std::shared_ptr<const StochasticProcess> z0, std::shared_ptr<const StochasticProcess> y1,
                               std::shared_ptr<const StochasticProcess> y2);

// Noise with the real kernel Re α_β(τ): z = (z₀ + z₀'*)/√2 + y₁ + y₂*.
NoiseFn real_kernel_noise(std::shared_ptr<const StochasticProcess> z0, std::shared_ptr<const StochasticProcess> z0b,
                          std::shared_ptr<const StochasticProcess> y1, std::shared_ptr<const StochasticProcess> y2);

}  // namespace hops
