// cli.hpp - configuration documents and subcommands of the hopskit tool

#pragma once

#include <iosfwd>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hopskit/ensemble.hpp"
#include "hopskit/master_eq.hpp"
#include "hopskit/serialize.hpp"
#include "hopskit/spin_boson.hpp"

namespace hops::cli {

// Stable process exit codes.
enum ExitCode : int { kOk = 0, kFailure = 1, kFitTolerance = 2, kEnsembleFailure = 3, kConfigError = 4 };

// Everything one invocation needs. Sections of the INI document map onto the
// fields as documented in the README; `run.fit` stays empty until resolve_fit.
struct CliConfig {
    std::string label{"run"};
    SpinBosonParams params;
    std::string psi0{"up"};  // up, down or plus
    FitSpec fit;
    std::optional<ExponentialBCF> fit_terms;  // inline [fit] terms
    std::string fit_file;                     // [fit] file
    RunConfig run;
    MeOptions me;
    std::string out_dir{"."};
    std::string prefix;  // defaults to label
    std::string reference;

    // Rebuilds run.model, run.sd and run.thermal from params and psi0.
    void sync_model();
    std::string output_stem() const;
};

// Throws ConfigError on unknown sections or keys, unparsable values and
// inconsistent settings.
CliConfig load_ini(const std::string& path);
CliConfig parse_ini(std::istream& is, const std::string& label = "run");
CliConfig from_named(const std::string& label);

struct Overrides {
    std::optional<std::size_t> samples;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> mode;
    std::optional<int> k_max;
    std::optional<std::string> out_dir;
    bool skip_omega0{false};
    std::optional<std::string> variant;
};

void apply(CliConfig& cfg, const Overrides& o);

struct FitOutcome {
    ExponentialBCF bcf;
    std::optional<FitReport> report;  // absent for inline or file terms
    bool tolerance_met{true};
};

// Inline terms, then the fit file, then a fresh fit of the configured kernel.
FitOutcome resolve_fit(const CliConfig& cfg, std::ostream& log);

// Autocorrelation check of a sampled process against its target kernel on an
// n_grid × n_grid grid over [0, t_max].
struct NoiseCheck {
    double max_corr_error{0.0};
    double max_pseudo{0.0};
    double bound{0.0};  // abstol + 5|α(0)|/√samples
    bool passed() const noexcept { return max_corr_error <= bound && max_pseudo <= bound; }
};
NoiseCheck check_noise(const Spectrum& spectrum, const std::function<cplx(double)>& kernel, double t_max,
                       double abstol, std::size_t samples, std::uint64_t seed, int n_grid = 20);

struct Comparison {
    double max_deviation{0.0};
    double rms_deviation{0.0};
    std::size_t points{0};
};
// B interpolated linearly onto the times of A inside [t_min, t_max] and the
// overlap of both ranges. Throws ConfigError when the ranges are disjoint.
Comparison compare_series(const SigmaZSeries& a, const SigmaZSeries& b, double t_min, double t_max);

int cmd_fit(const CliConfig& cfg, int n_min, int n_max, std::ostream& out, std::ostream& log);
int cmd_noise(const CliConfig& cfg, std::size_t samples, std::ostream& out, std::ostream& log);
int cmd_run(const CliConfig& cfg, std::ostream& out, std::ostream& log, bool progress);
int cmd_me(const CliConfig& cfg, std::ostream& out, std::ostream& log);
int cmd_compare(const std::string& a, const std::string& b, double tol, double t_min, double t_max,
                std::ostream& out);
int cmd_configs(const std::string& show, std::ostream& out);

}  // namespace hops::cli
