// thermal.cpp - finite temperature as a stochastic Hermitian Hamiltonian shift

#include "hopskit/thermal.hpp"

#include <cmath>

namespace hops {

void ThermalConfig::validate() const {
    if (!(beta > 0.0)) throw DomainError("thermal: beta must be > 0");
    if (!(noise_abstol > 0.0)) throw DomainError("thermal: noise_abstol must be > 0");
}

std::shared_ptr<const NoisePlan> make_thermal_plan(const OhmicSpectralDensity& sd, const ThermalConfig& cfg,
                                                   double t_max) {
    cfg.validate();
    if (!cfg.enabled() || sd.alpha == 0.0) return nullptr;
    return std::make_shared<NoisePlan>(plan_noise(thermal_noise_spectrum(sd, cfg.beta), t_max, cfg.noise_abstol));
}

std::optional<StochasticProcess> make_thermal_process(const OhmicSpectralDensity& sd, const ThermalConfig& cfg,
                                                      double t_max, std::uint64_t seed, std::uint64_t stream) {
    auto plan = make_thermal_plan(sd, cfg, t_max);
    if (!plan) return std::nullopt;
    return sample_process(std::move(plan), seed + cfg.seed_offset, stream);
}

CMatrix shifted_hamiltonian(const SystemModel& model, cplx y) {
    return model.h_sys + y * model.coupling_l.adjoint() + std::conj(y) * model.coupling_l;
}

HamiltonianShift thermal_shift(const SystemModel& model, std::shared_ptr<const StochasticProcess> y) {
    if (!y) return {};
    return [l = model.coupling_l, y = std::move(y)](double t) -> CMatrix {
        const cplx v = (*y)(t);
        return v * l.adjoint() + std::conj(v) * l;
    };
}

double thermal_force_autocorrelation(const OhmicSpectralDensity& sd, double beta, double tau) {
    if (!(beta > 0.0)) throw DomainError("thermal_force_autocorrelation: beta must be > 0");
    return 2.0 * thermal_kernel_real(sd, beta, std::abs(tau));
}

NoiseFn full_temperature_noise(std::shared_ptr<const StochasticProcess> z0, std::shared_ptr<const StochasticProcess> y1,
                               std::shared_ptr<const StochasticProcess> y2) {
    return [z0 = std::move(z0), y1 = std::move(y1), y2 = std::move(y2)](double t) {
        return (*z0)(t) + (*y1)(t) + std::conj((*y2)(t));
    };
}

NoiseFn real_kernel_noise(std::shared_ptr<const StochasticProcess> z0, std::shared_ptr<const StochasticProcess> z0b,
                          std::shared_ptr<const StochasticProcess> y1, std::shared_ptr<const StochasticProcess> y2) {
    const double r = 1.0 / std::sqrt(2.0);
    return [=](double t) { return r * ((*z0)(t) + std::conj((*z0b)(t))) + (*y1)(t) + std::conj((*y2)(t)); };
}

}  // namespace hops
