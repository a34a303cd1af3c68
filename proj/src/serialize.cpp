// serialize.cpp - JSON forms of the configuration types and result export

#include "hopskit/serialize.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace hops {

namespace {

json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

cplx complex_from_json(const json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (!j.is_array() || j.size() != 2) throw ConfigError("expected a complex number [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

json matrix_to_json(const CMatrix& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
        rows.push_back(row);
    }
    return rows;
}

CMatrix matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw ConfigError("expected a matrix as an array of rows");
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = static_cast<Eigen::Index>(j[0].size());
    CMatrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        if (static_cast<Eigen::Index>(j[r].size()) != cols) throw ConfigError("ragged matrix rows");
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = complex_from_json(j[r][c]);
    }
    return m;
}

// Reads key into out if present; unknown keys are caught by require_keys.
template <class T>
void read_opt(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

void require_keys(const json& j, std::initializer_list<const char*> allowed, const char* what) {
    if (!j.is_object()) throw ConfigError(std::string(what) + ": expected an object");
    for (const auto& [k, v] : j.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || k == a;
        if (!ok) throw ConfigError(std::string(what) + ": unknown key '" + k + "'");
    }
}

// 17 significant digits in scientific notation.
struct Sci {
    double v;
};
std::ostream& operator<<(std::ostream& os, Sci s) {
    return os << std::scientific << std::setprecision(16) << s.v;
}

}  // namespace

json beta_to_json(double beta) { return std::isinf(beta) ? json("inf") : json(beta); }

double beta_from_json(const json& j) {
    if (j.is_string() && j.get<std::string>() == "inf") return kInfiniteBeta;
    if (!j.is_number()) throw ConfigError("beta must be a number or \"inf\"");
    return j.get<double>();
}

void to_json(json& j, const OhmicSpectralDensity& sd) {
    j = {{"s", sd.s}, {"omega_c", sd.omega_c}, {"alpha", sd.alpha}};
}

void from_json(const json& j, OhmicSpectralDensity& sd) {
    require_keys(j, {"s", "omega_c", "alpha"}, "spectral density");
    try {
        sd = OhmicSpectralDensity::make(j.at("s").get<double>(), j.at("omega_c").get<double>(),
                                        j.at("alpha").get<double>());
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
}

void to_json(json& j, const ExponentialBCF& e) {
    j = json::array();
    for (const auto& t : e.terms) j.push_back({{"G", complex_to_json(t.G)}, {"W", complex_to_json(t.W)}});
}

void from_json(const json& j, ExponentialBCF& e) {
    if (!j.is_array()) throw ConfigError("fit terms: expected an array");
    std::vector<ExpTerm> terms;
    for (const auto& t : j) {
        require_keys(t, {"G", "W"}, "fit term");
        terms.push_back({complex_from_json(t.at("G")), complex_from_json(t.at("W"))});
    }
    try {
        e = ExponentialBCF::make(std::move(terms));
    } catch (const DomainError& err) {
        throw ConfigError(err.what());
    }
}

void to_json(json& j, const SystemModel& m) {
    json psi = json::array();
    for (Eigen::Index i = 0; i < m.psi0.size(); ++i) psi.push_back(complex_to_json(m.psi0(i)));
    j = {{"h_sys", matrix_to_json(m.h_sys)}, {"coupling_l", matrix_to_json(m.coupling_l)}, {"psi0", psi}};
}

void from_json(const json& j, SystemModel& m) {
    require_keys(j, {"h_sys", "coupling_l", "psi0"}, "system model");
    const auto& p = j.at("psi0");
    CVector psi(static_cast<Eigen::Index>(p.size()));
    for (std::size_t i = 0; i < p.size(); ++i) psi(static_cast<Eigen::Index>(i)) = complex_from_json(p[i]);
    try {
        m = SystemModel::make(matrix_from_json(j.at("h_sys")), matrix_from_json(j.at("coupling_l")), psi);
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
}

void to_json(json& j, const IntegratorOptions& o) {
    j = {{"rtol", o.rtol},
         {"atol", o.atol},
         {"initial_dt", o.initial_dt},
         {"max_rhs_evaluations", o.max_rhs_evaluations}};
}

void from_json(const json& j, IntegratorOptions& o) {
    require_keys(j, {"rtol", "atol", "initial_dt", "max_rhs_evaluations"}, "integrator");
    read_opt(j, "rtol", o.rtol);
    read_opt(j, "atol", o.atol);
    read_opt(j, "initial_dt", o.initial_dt);
    read_opt(j, "max_rhs_evaluations", o.max_rhs_evaluations);
}

void to_json(json& j, const ThermalConfig& t) {
    j = {{"beta", beta_to_json(t.beta)}, {"noise_abstol", t.noise_abstol}, {"seed_offset", t.seed_offset}};
}

void from_json(const json& j, ThermalConfig& t) {
    require_keys(j, {"beta", "noise_abstol", "seed_offset"}, "thermal");
    t.beta = beta_from_json(j.at("beta"));
    read_opt(j, "noise_abstol", t.noise_abstol);
    read_opt(j, "seed_offset", t.seed_offset);
}

void to_json(json& j, const RunConfig& c) {
    j = {{"model", c.model},
         {"sd", c.sd},
         {"fit", c.fit},
         {"mode", to_string(c.mode)},
         {"k_max", c.k_max},
         {"n_samples", c.n_samples},
         {"master_seed", c.master_seed},
         {"first_sample", c.first_sample},
         {"thermal", c.thermal ? json(*c.thermal) : json(nullptr)},
         {"thermal_method", to_string(c.thermal_method)},
         {"noise_abstol", c.noise_abstol},
         {"t_grid", c.t_grid},
         {"integrator", c.integrator}};
}

void from_json(const json& j, RunConfig& c) {
    require_keys(j,
                 {"model", "sd", "fit", "mode", "k_max", "n_samples", "master_seed", "first_sample", "thermal",
                  "thermal_method", "noise_abstol", "t_grid", "integrator"},
                 "run config");
    c.model = j.at("model").get<SystemModel>();
    c.sd = j.at("sd").get<OhmicSpectralDensity>();
    c.fit = j.at("fit").get<ExponentialBCF>();
    const auto mode = j.at("mode").get<std::string>();
    if (mode != "linear" && mode != "nonlinear") throw ConfigError("mode must be linear or nonlinear");
    c.mode = mode == "linear" ? Mode::linear : Mode::nonlinear;
    c.k_max = j.at("k_max").get<int>();
    c.n_samples = j.at("n_samples").get<std::size_t>();
    read_opt(j, "master_seed", c.master_seed);
    read_opt(j, "first_sample", c.first_sample);
    if (j.contains("thermal") && !j.at("thermal").is_null())
        c.thermal = j.at("thermal").get<ThermalConfig>();
    else
        c.thermal.reset();
    if (j.contains("thermal_method")) c.thermal_method = thermal_method_from_string(j.at("thermal_method"));
    read_opt(j, "noise_abstol", c.noise_abstol);
    c.t_grid = j.at("t_grid").get<std::vector<double>>();
    if (j.contains("integrator")) c.integrator = j.at("integrator").get<IntegratorOptions>();
}

void to_json(json& j, const EnsembleResult& r) {
    json failures = json::array();
    for (const auto& f : r.failures)
        failures.push_back({{"index", f.index}, {"time", f.time}, {"message", f.message}});
    json mean = json::array(), m2 = json::array();
    for (std::size_t n = 0; n < r.mean.size(); ++n) {
        mean.push_back(std::vector<double>(r.mean[n].data(), r.mean[n].data() + r.mean[n].size()));
        m2.push_back(std::vector<double>(r.m2[n].data(), r.m2[n].data() + r.m2[n].size()));
    }
    j = {{"version", kVersion},        {"t_grid", r.t_grid},           {"dim", r.dim},
         {"mode", to_string(r.mode)},  {"n_samples", r.n_samples},     {"n_attempted", r.n_attempted},
         {"failures", failures},       {"config_hash", r.config_hash}, {"master_seed", r.master_seed},
         {"wall_time", r.wall_time},   {"mean", mean},                 {"m2", m2}};
}

void from_json(const json& j, EnsembleResult& r) {
    require_keys(j,
                 {"version", "t_grid", "dim", "mode", "n_samples", "n_attempted", "failures", "config_hash",
                  "master_seed", "wall_time", "mean", "m2"},
                 "ensemble result");
    r.t_grid = j.at("t_grid").get<std::vector<double>>();
    r.dim = j.at("dim").get<int>();
    const auto mode = j.at("mode").get<std::string>();
    if (mode != "linear" && mode != "nonlinear") throw ConfigError("mode must be linear or nonlinear");
    r.mode = mode == "linear" ? Mode::linear : Mode::nonlinear;
    r.n_samples = j.at("n_samples").get<std::size_t>();
    r.n_attempted = j.at("n_attempted").get<std::size_t>();
    r.failures.clear();
    for (const auto& f : j.at("failures"))
        r.failures.push_back({f.at("index").get<std::size_t>(), f.at("time").get<double>(),
                              f.at("message").get<std::string>()});
    r.config_hash = j.at("config_hash").get<std::uint64_t>();
    r.master_seed = j.at("master_seed").get<std::uint64_t>();
    r.wall_time = j.at("wall_time").get<double>();
    const auto len = static_cast<Eigen::Index>(2 * r.dim * r.dim);
    const auto& mean = j.at("mean");
    const auto& m2 = j.at("m2");
    if (mean.size() != r.t_grid.size() || m2.size() != r.t_grid.size())
        throw ConfigError("ensemble result: moment count differs from the time grid");
    r.mean.assign(r.t_grid.size(), Eigen::VectorXd());
    r.m2.assign(r.t_grid.size(), Eigen::MatrixXd());
    for (std::size_t n = 0; n < r.t_grid.size(); ++n) {
        const auto mv = mean[n].get<std::vector<double>>();
        const auto mm = m2[n].get<std::vector<double>>();
        if (static_cast<Eigen::Index>(mv.size()) != len || static_cast<Eigen::Index>(mm.size()) != len * len)
            throw ConfigError("ensemble result: moment size does not match dim");
        r.mean[n] = Eigen::Map<const Eigen::VectorXd>(mv.data(), len);
        r.m2[n] = Eigen::Map<const Eigen::MatrixXd>(mm.data(), len, len);
    }
    r.finalize();
}

void to_json(json& j, const SpinBosonParams& p) {
    j = {{"epsilon", p.epsilon}, {"delta", p.delta}, {"sd", p.sd}, {"beta", beta_to_json(p.beta)}};
}

void from_json(const json& j, SpinBosonParams& p) {
    require_keys(j, {"epsilon", "delta", "sd", "beta"}, "spin-boson parameters");
    p.epsilon = j.at("epsilon").get<double>();
    p.delta = j.at("delta").get<double>();
    p.sd = j.at("sd").get<OhmicSpectralDensity>();
    p.beta = beta_from_json(j.at("beta"));
}

void to_json(json& j, const FitReport& r) {
    j = {{"tau0", r.tau0},
         {"p", r.p},
         {"rel_p_error", r.rel_p_error},
         {"max_rel_error", r.max_rel_error},
         {"restarts_used", r.restarts_used},
         {"restarts_converged", r.restarts_converged},
         {"grid_points", r.grid_points},
         {"seed", r.seed}};
}

void to_json(json& j, const FitSpec& f) {
    j = {{"kernel", to_string(f.kernel)},
         {"n_terms", f.n_terms},
         {"tau0", f.tau0},
         {"p", f.p},
         {"max_rel_error", f.max_rel_error},
         {"grid_points", f.grid_points},
         {"restarts", f.restarts},
         {"seed", f.seed},
         {"max_rate", f.max_rate}};
}

void from_json(const json& j, FitSpec& f) {
    require_keys(j, {"kernel", "n_terms", "tau0", "p", "max_rel_error", "grid_points", "restarts", "seed",
                     "max_rate"},
                 "fit spec");
    if (j.contains("kernel")) f.kernel = fit_kernel_from_string(j.at("kernel").get<std::string>());
    read_opt(j, "n_terms", f.n_terms);
    read_opt(j, "tau0", f.tau0);
    read_opt(j, "p", f.p);
    read_opt(j, "max_rel_error", f.max_rel_error);
    read_opt(j, "grid_points", f.grid_points);
    read_opt(j, "restarts", f.restarts);
    read_opt(j, "seed", f.seed);
    read_opt(j, "max_rate", f.max_rate);
}

void to_json(json& j, const NamedConfig& c) {
    // the fit is produced on demand, so an empty one is stored as null
    json run = c.run;
    if (c.run.fit.size() == 0) run["fit"] = nullptr;
    j = {{"label", c.label},
         {"description", c.description},
         {"params", c.params},
         {"fit", c.fit},
         {"run", run},
         {"reference", c.reference}};
}

void from_json(const json& j, NamedConfig& c) {
    require_keys(j, {"label", "description", "params", "fit", "run", "reference"}, "named config");
    c.label = j.at("label").get<std::string>();
    c.description = j.at("description").get<std::string>();
    c.params = j.at("params").get<SpinBosonParams>();
    c.fit = j.at("fit").get<FitSpec>();
    json run = j.at("run");
    const bool unfitted = run.contains("fit") && run.at("fit").is_null();
    if (unfitted) run["fit"] = json::array({{{"G", 1.0}, {"W", 1.0}}});
    c.run = run.get<RunConfig>();
    if (unfitted) c.run.fit = ExponentialBCF{};
    c.reference = j.at("reference").get<std::string>();
}

void write_result_csv(std::ostream& os, const EnsembleResult& r) {
    const int d = r.dim;
    os << "t";
    for (const char* part : {"re", "im"})
        for (int i = 0; i < d; ++i)
            for (int k = 0; k < d; ++k) os << ',' << part << "_rho_" << i << k;
    for (const char* part : {"se_re", "se_im"})
        for (int i = 0; i < d; ++i)
            for (int k = 0; k < d; ++k) os << ',' << part << "_rho_" << i << k;
    std::optional<ObservableSeries> sz;
    if (d == 2) {
        sz = observable_series(r, pauli_z());
        os << ",sigma_z,se_sigma_z";
    }
    os << '\n';
    for (std::size_t n = 0; n < r.t_grid.size(); ++n) {
        os << Sci{r.t_grid[n]};
        const CMatrix& rho = r.rho_series[n];
        const CMatrix& se = r.stderr_series[n];
        for (int i = 0; i < d; ++i)
            for (int k = 0; k < d; ++k) os << ',' << Sci{rho(i, k).real()};
        for (int i = 0; i < d; ++i)
            for (int k = 0; k < d; ++k) os << ',' << Sci{rho(i, k).imag()};
        for (int i = 0; i < d; ++i)
            for (int k = 0; k < d; ++k) os << ',' << Sci{se(i, k).real()};
        for (int i = 0; i < d; ++i)
            for (int k = 0; k < d; ++k) os << ',' << Sci{se(i, k).imag()};
        if (sz) os << ',' << Sci{sz->value[n]} << ',' << Sci{sz->stderr_[n]};
        os << '\n';
    }
}

json result_sidecar(const RunConfig& cfg, const EnsembleResult& r) {
    json failures = json::array();
    for (const auto& f : r.failures)
        failures.push_back({{"index", f.index}, {"time", f.time}, {"message", f.message}});
    std::ostringstream hash;
    hash << std::hex << std::setw(16) << std::setfill('0') << r.config_hash;
    return {{"version", kVersion},
            {"config", cfg},
            {"config_hash", hash.str()},
            {"master_seed", r.master_seed},
            {"seed_scheme", "trajectory i uses engine streams 4i..4i+3 of master_seed; thermal seed + seed_offset"},
            {"n_samples", r.n_samples},
            {"n_attempted", r.n_attempted},
            {"failures", failures},
            {"fit_terms", cfg.fit},
            {"wall_time_s", r.wall_time}};
}

void write_me_csv(std::ostream& os, const MeResult& r) {
    os << "t,re_rho_00,re_rho_01,re_rho_10,re_rho_11,im_rho_00,im_rho_01,im_rho_10,im_rho_11,sigma_z";
    for (const char* w : {"m2l", "0", "p2l"}) os << ",rate_" << w << ",shift_" << w;
    os << '\n';
    const auto sz = sigma_z_series(r);
    for (std::size_t n = 0; n < r.times.size(); ++n) {
        os << Sci{r.times[n]};
        for (int part = 0; part < 2; ++part)
            for (int i = 0; i < 2; ++i)
                for (int k = 0; k < 2; ++k)
                    os << ',' << Sci{part == 0 ? r.rho[n](i, k).real() : r.rho[n](i, k).imag()};
        os << ',' << Sci{sz[n]};
        for (const auto& c : r.channels[n]) os << ',' << Sci{c.real()} << ',' << Sci{c.imag()};
        os << '\n';
    }
}

SigmaZSeries read_sigma_z_csv(std::istream& is) {
    std::string line;
    std::vector<std::string> header;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) header.push_back(cell);
        break;
    }
    auto column = [&](const std::string& name) -> int {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return static_cast<int>(i);
        return -1;
    };
    const int ct = column("t");
    int cz = column("sigma_z");
    const int cse = column("se_sigma_z");
    const int c00 = column("re_rho_00"), c11 = column("re_rho_11");
    if (ct < 0 || (cz < 0 && (c00 < 0 || c11 < 0))) throw ConfigError("CSV lacks t and sigma_z (or rho) columns");

    SigmaZSeries out;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<double> v;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                v.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw ConfigError("CSV: cannot parse '" + cell + "'");
            }
        }
        if (v.size() != header.size()) throw ConfigError("CSV: row width differs from the header");
        out.t.push_back(v[ct]);
        out.sigma_z.push_back(cz >= 0 ? v[cz] : v[c00] - v[c11]);
        if (cse >= 0) out.stderr_.push_back(v[cse]);
    }
    return out;
}

}  // namespace hops
