// stocproc.hpp - stationary complex Gaussian processes by spectral sampling

#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "hopskit/bcf.hpp"
#include "hopskit/spline.hpp"
#include "hopskit/types.hpp"

namespace hops {

// Nonnegative spectral function S(ω) on ω > 0 with autocorrelation
// α(τ) = (1/π)∫_0^∞ S(ω) e^{-iωτ} dω.
struct Spectrum {
    std::function<double(double)> density;  // never called at ω = 0
    double scale{1.0};         // characteristic frequency (cutoff search, panels)
    double origin_power{1.0};  // u = ω^p regularizes ∫_0 of S near the origin
    // Closed-form α(τ) if known; otherwise the planner integrates S.
    std::function<cplx(double)> exact_bcf;
};

// J(ω) with the closed-form zero-temperature correlation as reference.
Spectrum zero_temp_spectrum(const OhmicSpectralDensity& sd);

// n̄(βω) J(ω); its correlation is the thermal kernel.
Spectrum thermal_noise_spectrum(const OhmicSpectralDensity& sd, double beta);

struct PlanOptions {
    std::size_t node_budget{std::size_t{1} << 24};
    std::size_t check_points{1000};  // τ samples on [0, t_max] for the Riemann check
};

struct NoisePlan {
    double omega_0{0.0};
    double d_omega{0.0};
    std::size_t n{0};        // FFT length; n·Δω·Δt = 2π
    std::size_t n_nodes{0};  // frequencies with nonzero weight, ω_k = ω_0 + kΔω
    double d_t{0.0};
    double t_max{0.0};
    double abstol{0.0};
    double omega_1{0.0};              // spectral cutoff, S < 1e-12 of its peak beyond
    double riemann_error{0.0};        // max |α_apx - α| on the check set
    double interpolation_error{0.0};  // max spline error of α_apx at midpoints
    std::shared_ptr<const Spectrum> spectrum;
    // sqrt(c_k/π) per node, c_k = Δω S(ω_k) and c_0 = ∫_0^{Δω/2} S
    std::shared_ptr<const std::vector<double>> amplitudes;

    // Midpoint-rule correlation (1/π) Σ c_k e^{-iω_k τ}, by direct summation.
    cplx reconstructed_bcf(double tau) const;
};

// Tolerance unreachable within the node budget.
class PlanError : public std::runtime_error {
public:
    PlanError(const std::string& what, double riemann, double interpolation)
        : std::runtime_error(what), riemann_error(riemann), interpolation_error(interpolation) {}
    double riemann_error;
    double interpolation_error;
};

// Halves Δω (Riemann check) and Δt (interpolation check) independently until
// both maximum absolute errors fall below abstol.
NoisePlan plan_noise(const Spectrum& spectrum, double t_max, double abstol, const PlanOptions& options = {});

class StochasticProcess {
public:
    StochasticProcess() = default;
    StochasticProcess(std::shared_ptr<const NoisePlan> plan, std::vector<cplx> values, std::uint64_t seed);

    // Cubic-spline value; exact at grid nodes. Domain [0, n·Δt].
    cplx operator()(double t) const { return spline_(t); }
    cplx evaluate(double t) const { return spline_(t); }

    // z_l at t_l = l·Δt, l = 0..n-1.
    std::span<const cplx> values() const noexcept { return spline_.nodes().first(plan_->n); }
    const NoisePlan& plan() const noexcept { return *plan_; }
    std::uint64_t seed() const noexcept { return seed_; }

private:
    std::shared_ptr<const NoisePlan> plan_;
    UniformCubicSpline spline_;
    std::uint64_t seed_{0};
};

// Y_k = (ξ₁ + iξ₂)/√2 from the engine for (seed, stream).
StochasticProcess sample_process(std::shared_ptr<const NoisePlan> plan, std::uint64_t seed, std::uint64_t stream = 0);

// Process built from caller-supplied Y_k (size n_nodes); deterministic linear map.
StochasticProcess process_from_gaussians(std::shared_ptr<const NoisePlan> plan, std::span<const cplx> y,
                                         std::uint64_t seed = 0);

// Header: n, Δt, seed as 64-bit little-endian; then Re, Im of each z_l.
void write_process(std::ostream& os, const StochasticProcess& p);

struct ProcessDump {
    std::uint64_t n;
    double d_t;
    std::uint64_t seed;
    std::vector<cplx> values;
};
ProcessDump read_process(std::istream& is);

}  // namespace hops
