// ensemble.hpp - Monte-Carlo trajectory ensembles and reduced density matrices

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hopskit/bcf.hpp"
#include "hopskit/expfit.hpp"
#include "hopskit/hops.hpp"
#include "hopskit/thermal.hpp"

namespace hops {

// How a finite temperature enters the run.
//   shift:       zero-temperature noise z, thermal y as L†y + Ly* on H_S
//   full_kernel: z carries the full thermal kernel (fit must match it)
//   real_kernel: z carries Re of the thermal kernel (fit must match it)
enum class ThermalMethod { shift, full_kernel, real_kernel };

const char* to_string(ThermalMethod m) noexcept;
ThermalMethod thermal_method_from_string(const std::string& s);

struct RunConfig {
    SystemModel model;
    OhmicSpectralDensity sd;  // generates the driving noise
    ExponentialBCF fit;       // drives the hierarchy
    Mode mode{Mode::nonlinear};
    int k_max{4};
    std::size_t n_samples{1000};
    std::uint64_t master_seed{0};
    std::size_t first_sample{0};  // index of the first trajectory (split ensembles)
    std::optional<ThermalConfig> thermal;
    ThermalMethod thermal_method{ThermalMethod::shift};
    double noise_abstol{1e-2};
    std::vector<double> t_grid;
    IntegratorOptions integrator;

    // Throws DomainError on an empty/unsorted grid, n_samples = 0 or a
    // mismatch between the fit, the model and the thermal settings.
    void validate() const;
};

// Per-trajectory failure, replayable from (master_seed, index).
struct TrajectoryFailure {
    std::size_t index{0};
    double time{0.0};
    std::string message;
};

// Running mean over trajectories of v = (Re P, Im P) per time, P the d×d
// projector with entries in row-major order, and the centered second moment
// Σ (v - mean)(v - mean)ᵀ; ρ and its errors derive from them.
struct EnsembleResult {
    std::vector<double> t_grid;
    int dim{0};
    Mode mode{Mode::nonlinear};
    std::size_t n_samples{0};    // successful trajectories
    std::size_t n_attempted{0};  // including failures
    std::vector<TrajectoryFailure> failures;
    std::uint64_t config_hash{0};
    std::uint64_t master_seed{0};
    double wall_time{0.0};

    std::vector<Eigen::VectorXd> mean;  // per time, length 2d²
    std::vector<Eigen::MatrixXd> m2;    // per time, 2d² × 2d²

    std::vector<CMatrix> rho_series;
    // Standard error of Re ρ_ij in the real part, of Im ρ_ij in the imaginary part.
    std::vector<CMatrix> stderr_series;

    // Recomputes rho_series and stderr_series from mean and m2.
    void finalize();
};

// Combines two ensembles over disjoint trajectories of the same configuration
// (pairwise update of mean and centered moments).
EnsembleResult merge(const EnsembleResult& a, const EnsembleResult& b);

// More than 1% of the trajectories failed; carries the completed result.
class EnsembleError : public std::runtime_error {
public:
    EnsembleError(const std::string& what, EnsembleResult partial)
        : std::runtime_error(what), partial_(std::move(partial)) {}
    const EnsembleResult& partial() const noexcept { return partial_; }

private:
    EnsembleResult partial_;
};

// Trajectory i uses engine streams 4i..4i+3 of master_seed (z, second z for
// the real kernel, y₁, y₂), thermal streams offset by seed_offset.
EnsembleResult run_ensemble(const RunConfig& cfg);

// Called after each reduced chunk with (trajectories done, total).
using ProgressFn = std::function<void(std::size_t, std::size_t)>;

// Same run, with snapshots after the first n trajectories for each n in
// checkpoints (strictly ascending, at most n_samples); the full ensemble is
// always the last element.
std::vector<EnsembleResult> run_ensemble_nested(const RunConfig& cfg, const std::vector<std::size_t>& checkpoints,
                                                const ProgressFn& progress = {});

// Single trajectory i of the configuration, for replay and diagnostics.
TrajectoryResult run_trajectory(const RunConfig& cfg, std::size_t index);

struct ObservableSeries {
    std::vector<double> t;
    std::vector<double> value;
    std::vector<double> stderr_;
};

// Re tr(ρ(t) op) with the standard error of the trajectory mean (equal to the
// delete-one jackknife error of a mean). Non-Hermitian op: warning on stderr.
ObservableSeries observable_series(const EnsembleResult& res, const CMatrix& op);

struct ConvergenceReport {
    std::vector<std::size_t> n;
    std::vector<double> max_deviation;  // max_t |⟨op⟩_n - ⟨op⟩_{n_max}|
    std::vector<double> max_stderr;     // max_t standard error at n
    double stderr_slope{0.0};           // d log(max_stderr) / d log n, ideally -1/2
    // max_deviation_i / sqrt(1/n_i - 1/n_max) normalized to the first entry;
    // stays near 1 when the deviation follows the 1/√n law.
    // One entry per n except the last.
    std::vector<double> deviation_scaling;
};

ConvergenceReport convergence_report(const std::vector<EnsembleResult>& nested, const CMatrix& op);

// FNV-1a 64 of the canonical JSON form of the configuration.
std::uint64_t config_hash(const RunConfig& cfg);

}  // namespace hops
