// serialize.hpp - JSON forms of the configuration types and result export

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "hopskit/ensemble.hpp"
#include "hopskit/master_eq.hpp"
#include "hopskit/spin_boson.hpp"

namespace hops {

inline constexpr const char* kVersion = "0.1.0";

using json = nlohmann::json;

// Complex numbers are [re, im]; matrices are row-major arrays of rows;
// an infinite β is the string "inf". Readers throw ConfigError.
void to_json(json& j, const OhmicSpectralDensity& sd);
void from_json(const json& j, OhmicSpectralDensity& sd);
void to_json(json& j, const ExponentialBCF& e);
void from_json(const json& j, ExponentialBCF& e);
void to_json(json& j, const SystemModel& m);
void from_json(const json& j, SystemModel& m);
void to_json(json& j, const IntegratorOptions& o);
void from_json(const json& j, IntegratorOptions& o);
void to_json(json& j, const ThermalConfig& t);
void from_json(const json& j, ThermalConfig& t);
void to_json(json& j, const RunConfig& c);
void from_json(const json& j, RunConfig& c);
void to_json(json& j, const SpinBosonParams& p);
void from_json(const json& j, SpinBosonParams& p);
void to_json(json& j, const FitReport& r);
void to_json(json& j, const FitSpec& f);
void from_json(const json& j, FitSpec& f);
// An unfitted configuration stores run.fit as null.
void to_json(json& j, const NamedConfig& c);
void from_json(const json& j, NamedConfig& c);

// Raw moments (mean, m2) and bookkeeping; from_json calls finalize(), so a
// stored ensemble can be resumed with merge().
void to_json(json& j, const EnsembleResult& r);
void from_json(const json& j, EnsembleResult& r);

json beta_to_json(double beta);
double beta_from_json(const json& j);

// Columns: t, then re_rho_ij and im_rho_ij for each entry (row-major), then
// se_re_rho_ij and se_im_rho_ij, and for d = 2 sigma_z and se_sigma_z;
// 17 significant digits.
void write_result_csv(std::ostream& os, const EnsembleResult& r);

// Sidecar with the full configuration, seeds, failures, fit terms and version.
json result_sidecar(const RunConfig& cfg, const EnsembleResult& r);

// Columns: t, re/im of each ρ entry, then the per-channel rates and shifts.
void write_me_csv(std::ostream& os, const MeResult& r);

// A ⟨σ_z⟩ curve read from any of the CSV files above, or from a two-column
// fixture with a header "t,sigma_z". Lines starting with '#' are comments.
struct SigmaZSeries {
    std::vector<double> t;
    std::vector<double> sigma_z;
    std::vector<double> stderr_;  // empty when the file carries none
};
SigmaZSeries read_sigma_z_csv(std::istream& is);

}  // namespace hops
