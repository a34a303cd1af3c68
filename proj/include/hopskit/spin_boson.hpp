// spin_boson.hpp - the spin-boson benchmark model and named run configurations

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hopskit/ensemble.hpp"
#include "hopskit/master_eq.hpp"

namespace hops {

// H_S = εσ_z + Δσ_x, L = σ_z, ψ₀ = |↑⟩. Throws DomainError for ε = Δ = 0.
SystemModel make_spin_boson(double epsilon, double delta);

// Which correlation function the hierarchy fit approximates.
enum class FitKernel { zero_temperature, full_thermal, real_thermal };

const char* to_string(FitKernel k) noexcept;
FitKernel fit_kernel_from_string(const std::string& s);

struct FitSpec {
    FitKernel kernel{FitKernel::zero_temperature};
    int n_terms{5};
    double tau0{15.0};
    double p{10.0};
    double max_rel_error{1e-2};  // tolerance the fit must meet
    std::size_t grid_points{1000};
    int restarts{64};
    std::uint64_t seed{0};
    double max_rate{0.0};  // cap on |W| components, zero for none

    bool operator==(const FitSpec&) const = default;
};

// Samples the kernel selected by spec on [0, τ₀] (β ignored at zero temperature).
SampledKernel fit_target(const FitSpec& spec, const OhmicSpectralDensity& sd, double beta);

// fit_bcf on fit_target with ω_c as the initial rate scale; meeting
// max_rel_error is left to the caller.
FitResult fit_for(const FitSpec& spec, const OhmicSpectralDensity& sd, double beta);

struct NamedConfig {
    std::string label;
    std::string description;
    SpinBosonParams params;
    FitSpec fit;
    // Complete except for run.fit, which fit_for(fit, ...) supplies.
    RunConfig run;
    std::string reference;  // fixture path relative to the repository root, may be empty
};

std::vector<NamedConfig> named_configs();

// Throws ConfigError for an unknown label.
NamedConfig find_named(const std::string& label);

}  // namespace hops
