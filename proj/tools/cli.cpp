// cli.cpp - configuration documents and subcommands of the hopskit tool

#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "hopskit/parallel.hpp"
#include "hopskit/serialize.hpp"
#include "hopskit/stocproc.hpp"

namespace hops::cli {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& schema() {
    static const std::map<std::string, std::set<std::string>> s = {
        {"system", {"epsilon", "delta", "psi0"}},
        {"bath", {"s", "omega_c", "alpha"}},
        {"fit",
         {"kernel", "n_terms", "tau0", "p", "max_rel_error", "grid_points", "restarts", "seed", "max_rate", "file",
          "terms"}},
        {"noise", {"abstol"}},
        {"hierarchy", {"k_max", "mode", "rtol", "atol", "initial_dt", "max_rhs_evaluations"}},
        {"ensemble", {"n_samples", "seed", "first_sample", "t_max", "dt"}},
        {"thermal", {"temperature", "beta", "method", "noise_abstol", "seed_offset"}},
        {"output", {"dir", "prefix", "reference"}},
        {"me", {"variant", "skip_omega0", "freeze_side_channels", "rtol", "atol"}},
    };
    return s;
}

template <class T>
T parse_value(const std::string& section, const std::string& key, const std::string& text) {
    std::istringstream is(text);
    T v{};
    if constexpr (std::is_same_v<T, std::string>) {
        return text;
    } else if constexpr (std::is_same_v<T, bool>) {
        if (text == "true" || text == "1" || text == "yes") return true;
        if (text == "false" || text == "0" || text == "no") return false;
        throw ConfigError("[" + section + "] " + key + ": expected true or false, got '" + text + "'");
    } else {
        is >> v;
        if (!is || !(is >> std::ws).eof())
            throw ConfigError("[" + section + "] " + key + ": cannot parse '" + text + "'");
    }
    return v;
}

class Document {
public:
    explicit Document(const pt::ptree& tree) : tree_(tree) {
        for (const auto& [section, body] : tree) {
            const auto it = schema().find(section);
            if (it == schema().end()) throw ConfigError("unknown section [" + section + "]");
            if (!body.data().empty()) throw ConfigError("key '" + section + "' outside any section");
            for (const auto& [key, value] : body)
                if (!it->second.count(key)) throw ConfigError("[" + section + "]: unknown key '" + key + "'");
        }
    }

    template <class T>
    void read(const char* section, const char* key, T& out) const {
        const auto s = tree_.get_child_optional(section);
        if (!s) return;
        const auto v = s->get_optional<std::string>(key);
        if (v) out = parse_value<T>(section, key, *v);
    }

    bool has(const char* section, const char* key) const {
        const auto s = tree_.get_child_optional(section);
        return s && s->get_child_optional(key);
    }

private:
    const pt::ptree& tree_;
};

std::vector<double> uniform_grid(double t_max, double dt) {
    if (!(t_max > 0.0) || !(dt > 0.0)) throw ConfigError("[ensemble] t_max and dt must be > 0");
    const auto n = static_cast<int>(std::lround(t_max / dt));
    if (n < 1) throw ConfigError("[ensemble] dt exceeds t_max");
    std::vector<double> t(n + 1);
    for (int i = 0; i <= n; ++i) t[i] = t_max * i / n;
    return t;
}

// "Re(G) Im(G) Re(W) Im(W)" per term, terms separated by ';'.
ExponentialBCF parse_terms(const std::string& text) {
    std::vector<ExpTerm> terms;
    std::stringstream all(text);
    std::string item;
    while (std::getline(all, item, ';')) {
        if (item.find_first_not_of(" \t") == std::string::npos) continue;
        std::istringstream is(item);
        double gr, gi, wr, wi;
        if (!(is >> gr >> gi >> wr >> wi) || !(is >> std::ws).eof())
            throw ConfigError("[fit] terms: expected 'Re(G) Im(G) Re(W) Im(W)' per term, got '" + item + "'");
        terms.push_back({cplx(gr, gi), cplx(wr, wi)});
    }
    try {
        return ExponentialBCF::make(std::move(terms));
    } catch (const DomainError& e) {
        throw ConfigError(std::string("[fit] terms: ") + e.what());
    }
}

Mode mode_from_string(const std::string& s) {
    if (s == "linear") return Mode::linear;
    if (s == "nonlinear") return Mode::nonlinear;
    throw ConfigError("mode must be linear or nonlinear, got '" + s + "'");
}

MeVariant variant_from_string(const std::string& s) {
    if (s == "constant") return MeVariant::constant;
    if (s == "extended") return MeVariant::extended;
    throw ConfigError("variant must be constant or extended, got '" + s + "'");
}

CVector initial_state(const std::string& name) {
    CVector psi(2);
    if (name == "up")
        psi << 1.0, 0.0;
    else if (name == "down")
        psi << 0.0, 1.0;
    else if (name == "plus")
        psi << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    else
        throw ConfigError("[system] psi0 must be up, down or plus, got '" + name + "'");
    return psi;
}

std::ofstream open_output(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot write " + path.string());
    return os;
}

}  // namespace

void CliConfig::sync_model() {
    if (params.epsilon == 0.0 && params.delta == 0.0) throw ConfigError("[system] epsilon and delta both zero");
    run.model = SystemModel::make(params.epsilon * pauli_z() + params.delta * pauli_x(), pauli_z(), initial_state(psi0));
    run.sd = params.sd;
    if (std::isfinite(params.beta)) {
        ThermalConfig th = run.thermal.value_or(ThermalConfig{});
        th.beta = params.beta;
        run.thermal = th;
    } else {
        run.thermal.reset();
    }
}

std::string CliConfig::output_stem() const { return (fs::path(out_dir) / (prefix.empty() ? label : prefix)).string(); }

CliConfig parse_ini(std::istream& is, const std::string& label) {
    pt::ptree tree;
    try {
        pt::read_ini(is, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    const Document doc(tree);
    CliConfig c;
    c.label = label;
    c.params.sd = OhmicSpectralDensity{};

    doc.read("system", "epsilon", c.params.epsilon);
    doc.read("system", "delta", c.params.delta);
    doc.read("system", "psi0", c.psi0);

    double s = 1.0, omega_c = 1.0, alpha = 0.0;
    doc.read("bath", "s", s);
    doc.read("bath", "omega_c", omega_c);
    doc.read("bath", "alpha", alpha);
    try {
        c.params.sd = OhmicSpectralDensity::make(s, omega_c, alpha);
    } catch (const DomainError& e) {
        throw ConfigError(std::string("[bath] ") + e.what());
    }

    std::string kernel = to_string(c.fit.kernel);
    doc.read("fit", "kernel", kernel);
    c.fit.kernel = fit_kernel_from_string(kernel);
    doc.read("fit", "n_terms", c.fit.n_terms);
    doc.read("fit", "tau0", c.fit.tau0);
    doc.read("fit", "p", c.fit.p);
    doc.read("fit", "max_rel_error", c.fit.max_rel_error);
    doc.read("fit", "grid_points", c.fit.grid_points);
    doc.read("fit", "restarts", c.fit.restarts);
    doc.read("fit", "seed", c.fit.seed);
    c.fit.max_rate = 5.0 * omega_c;
    doc.read("fit", "max_rate", c.fit.max_rate);
    doc.read("fit", "file", c.fit_file);
    if (doc.has("fit", "terms")) {
        std::string terms;
        doc.read("fit", "terms", terms);
        c.fit_terms = parse_terms(terms);
    }

    doc.read("noise", "abstol", c.run.noise_abstol);

    std::string mode = to_string(c.run.mode);
    doc.read("hierarchy", "k_max", c.run.k_max);
    doc.read("hierarchy", "mode", mode);
    c.run.mode = mode_from_string(mode);
    doc.read("hierarchy", "rtol", c.run.integrator.rtol);
    doc.read("hierarchy", "atol", c.run.integrator.atol);
    doc.read("hierarchy", "initial_dt", c.run.integrator.initial_dt);
    doc.read("hierarchy", "max_rhs_evaluations", c.run.integrator.max_rhs_evaluations);

    double t_max = 15.0, dt = 0.05;
    doc.read("ensemble", "n_samples", c.run.n_samples);
    doc.read("ensemble", "seed", c.run.master_seed);
    doc.read("ensemble", "first_sample", c.run.first_sample);
    doc.read("ensemble", "t_max", t_max);
    doc.read("ensemble", "dt", dt);
    c.run.t_grid = uniform_grid(t_max, dt);

    if (doc.has("thermal", "temperature") && doc.has("thermal", "beta"))
        throw ConfigError("[thermal] give either temperature or beta");
    double temperature = 0.0;
    doc.read("thermal", "temperature", temperature);
    if (temperature < 0.0) throw ConfigError("[thermal] temperature must be >= 0");
    c.params.beta = temperature > 0.0 ? 1.0 / temperature : kInfiniteBeta;
    if (doc.has("thermal", "beta")) {
        std::string b;
        doc.read("thermal", "beta", b);
        c.params.beta = b == "inf" ? kInfiniteBeta : parse_value<double>("thermal", "beta", b);
        if (!(c.params.beta > 0.0)) throw ConfigError("[thermal] beta must be > 0");
    }
    ThermalConfig th;
    doc.read("thermal", "noise_abstol", th.noise_abstol);
    doc.read("thermal", "seed_offset", th.seed_offset);
    c.run.thermal = th;
    std::string method = to_string(c.run.thermal_method);
    doc.read("thermal", "method", method);
    c.run.thermal_method = thermal_method_from_string(method);

    doc.read("output", "dir", c.out_dir);
    doc.read("output", "prefix", c.prefix);
    doc.read("output", "reference", c.reference);

    std::string variant = to_string(c.me.variant);
    doc.read("me", "variant", variant);
    c.me.variant = variant_from_string(variant);
    doc.read("me", "skip_omega0", c.me.skip_omega0);
    doc.read("me", "freeze_side_channels", c.me.freeze_side_channels);
    doc.read("me", "rtol", c.me.rtol);
    doc.read("me", "atol", c.me.atol);

    c.sync_model();
    return c;
}

CliConfig load_ini(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file " + path);
    return parse_ini(is, fs::path(path).stem().string());
}

CliConfig from_named(const std::string& label) {
    const NamedConfig n = find_named(label);
    CliConfig c;
    c.label = n.label;
    c.params = n.params;
    c.fit = n.fit;
    c.run = n.run;
    c.reference = n.reference;
    return c;
}

void apply(CliConfig& cfg, const Overrides& o) {
    if (o.samples) cfg.run.n_samples = *o.samples;
    if (o.seed) cfg.run.master_seed = *o.seed;
    if (o.mode) cfg.run.mode = mode_from_string(*o.mode);
    if (o.k_max) cfg.run.k_max = *o.k_max;
    if (o.out_dir) cfg.out_dir = *o.out_dir;
    if (o.skip_omega0) cfg.me.skip_omega0 = true;
    if (o.variant) cfg.me.variant = variant_from_string(*o.variant);
}

FitOutcome resolve_fit(const CliConfig& cfg, std::ostream& log) {
    FitOutcome out;
    if (cfg.fit_terms) {
        out.bcf = *cfg.fit_terms;
        return out;
    }
    if (!cfg.fit_file.empty()) {
        std::ifstream is(cfg.fit_file);
        if (!is) throw ConfigError("cannot open fit file " + cfg.fit_file);
        try {
            out.bcf = read_fit(is).bcf;
        } catch (const DomainError& e) {
            throw ConfigError("fit file " + cfg.fit_file + ": " + e.what());
        }
        return out;
    }
    log << "fitting " << to_string(cfg.fit.kernel) << " kernel: N=" << cfg.fit.n_terms << " tau0=" << cfg.fit.tau0
        << " p=" << cfg.fit.p << " restarts=" << cfg.fit.restarts << '\n';
    FitResult r;
    try {
        r = fit_for(cfg.fit, cfg.params.sd, cfg.params.beta);
    } catch (const FitError& e) {
        log << "warning: " << e.what() << "; using the best attempt\n";
        r = e.best();
        if (r.bcf.size() == 0) throw;
    }
    out.bcf = r.bcf;
    out.report = r.report;
    out.tolerance_met = r.report.max_rel_error <= cfg.fit.max_rel_error;
    log << "fit max_rel_error=" << r.report.max_rel_error << " (tolerance " << cfg.fit.max_rel_error << ")\n";
    return out;
}

NoiseCheck check_noise(const Spectrum& spectrum, const std::function<cplx(double)>& kernel, double t_max,
                       double abstol, std::size_t samples, std::uint64_t seed, int n_grid) {
    if (samples < 2 || n_grid < 2) throw DomainError("check_noise: need at least two samples and grid points");
    const auto plan = std::make_shared<const NoisePlan>(plan_noise(spectrum, t_max, abstol));
    std::vector<double> t(n_grid);
    for (int i = 0; i < n_grid; ++i) t[i] = t_max * i / (n_grid - 1);
    CMatrix corr = CMatrix::Zero(n_grid, n_grid), pseudo = CMatrix::Zero(n_grid, n_grid);
    CVector z(n_grid);
    for (std::size_t m = 0; m < samples; ++m) {
        const auto p = sample_process(plan, seed, m);
        for (int i = 0; i < n_grid; ++i) z(i) = p(t[i]);
        corr.noalias() += z * z.adjoint();
        pseudo.noalias() += z * z.transpose();
    }
    corr /= static_cast<double>(samples);
    pseudo /= static_cast<double>(samples);
    NoiseCheck r;
    for (int i = 0; i < n_grid; ++i)
        for (int k = 0; k < n_grid; ++k) {
            r.max_corr_error = std::max(r.max_corr_error, std::abs(corr(i, k) - kernel(t[i] - t[k])));
            r.max_pseudo = std::max(r.max_pseudo, std::abs(pseudo(i, k)));
        }
    r.bound = abstol + 5.0 * std::abs(kernel(0.0)) / std::sqrt(static_cast<double>(samples));
    return r;
}

Comparison compare_series(const SigmaZSeries& a, const SigmaZSeries& b, double t_min, double t_max) {
    if (a.t.empty() || b.t.empty()) throw ConfigError("compare: empty series");
    const double lo = std::max({t_min, a.t.front(), b.t.front()});
    const double hi = std::min({t_max, a.t.back(), b.t.back()});
    if (!(lo <= hi)) throw ConfigError("compare: time ranges do not overlap");
    Comparison c;
    double sum2 = 0.0;
    for (std::size_t i = 0; i < a.t.size(); ++i) {
        const double t = a.t[i];
        if (t < lo || t > hi) continue;
        const auto it = std::lower_bound(b.t.begin(), b.t.end(), t);
        double vb;
        if (it == b.t.begin()) {
            vb = b.sigma_z.front();
        } else if (it == b.t.end()) {
            vb = b.sigma_z.back();
        } else {
            const auto k = static_cast<std::size_t>(it - b.t.begin());
            const double w = (t - b.t[k - 1]) / (b.t[k] - b.t[k - 1]);
            vb = (1.0 - w) * b.sigma_z[k - 1] + w * b.sigma_z[k];
        }
        const double dev = std::abs(a.sigma_z[i] - vb);
        c.max_deviation = std::max(c.max_deviation, dev);
        sum2 += dev * dev;
        ++c.points;
    }
    if (c.points == 0) throw ConfigError("compare: no sample of A inside the common range");
    c.rms_deviation = std::sqrt(sum2 / static_cast<double>(c.points));
    return c;
}

int cmd_fit(const CliConfig& cfg, int n_min, int n_max, std::ostream& out, std::ostream& log) {
    if (n_min < 1 || n_max < n_min) throw ConfigError("fit: need 1 <= nmin <= nmax");
    const fs::path stem = cfg.output_stem();
    out << "N,rel_p_error,max_rel_error,restarts_converged\n";
    bool met = true;
    for (int n = n_min; n <= n_max; ++n) {
        FitSpec spec = cfg.fit;
        spec.n_terms = n;
        FitResult r;
        bool feasible = true;
        try {
            r = fit_for(spec, cfg.params.sd, cfg.params.beta);
        } catch (const FitError& e) {
            log << "N=" << n << ": " << e.what() << '\n';
            r = e.best();
            feasible = r.bcf.size() > 0;
        }
        out << n << ',' << r.report.rel_p_error << ',' << r.report.max_rel_error << ','
            << r.report.restarts_converged << '\n';
        if (n == n_max) {
            met = feasible && r.report.max_rel_error <= cfg.fit.max_rel_error;
            if (r.bcf.size() > 0) {
                auto os = open_output(stem.string() + ".fit");
                write_fit(os, r.bcf, r.report);
                auto js = open_output(stem.string() + ".fit.json");
                js << json{{"version", kVersion}, {"spec", spec}, {"report", r.report}, {"terms", r.bcf},
                           {"tolerance_met", met}}
                          .dump(2)
                   << '\n';
                log << "wrote " << stem.string() << ".fit\n";
            }
        }
    }
    return met ? kOk : kFitTolerance;
}

int cmd_noise(const CliConfig& cfg, std::size_t samples, std::ostream& out, std::ostream& log) {
    const double t_max = cfg.run.t_grid.back();
    const auto& sd = cfg.params.sd;
    out << "process,max_corr_error,max_pseudo,bound,result\n";
    bool ok = true;
    auto report = [&](const char* name, const NoiseCheck& r) {
        out << name << ',' << r.max_corr_error << ',' << r.max_pseudo << ',' << r.bound << ','
            << (r.passed() ? "PASS" : "FAIL") << '\n';
        ok = ok && r.passed();
    };
    log << "sampling " << samples << " realizations of z\n";
    report("z", check_noise(zero_temp_spectrum(sd), [&](double tau) { return bcf_zero_temp(sd, tau); }, t_max,
                            cfg.run.noise_abstol, samples, cfg.run.master_seed));
    if (std::isfinite(cfg.params.beta)) {
        const double beta = cfg.params.beta;
        const double abstol = cfg.run.thermal ? cfg.run.thermal->noise_abstol : ThermalConfig{}.noise_abstol;
        log << "sampling " << samples << " realizations of y\n";
        report("y", check_noise(thermal_noise_spectrum(sd, beta), [&](double tau) { return thermal_kernel(sd, beta, tau); },
                                t_max, abstol, samples, cfg.run.master_seed + 1));
    }
    return ok ? kOk : kFailure;
}

int cmd_run(const CliConfig& cfg, std::ostream& out, std::ostream& log, bool progress) {
    RunConfig run = cfg.run;
    const FitOutcome fit = resolve_fit(cfg, log);
    if (!fit.tolerance_met) {
        log << "error: fit misses max_rel_error; refusing to run\n";
        return kFitTolerance;
    }
    run.fit = fit.bcf;
    const std::string stem = cfg.output_stem();
    auto write = [&](const EnsembleResult& r) {
        auto csv = open_output(stem + ".csv");
        write_result_csv(csv, r);
        auto side = open_output(stem + ".json");
        json j = result_sidecar(run, r);
        j["label"] = cfg.label;
        if (fit.report) j["fit_report"] = *fit.report;
        side << j.dump(2) << '\n';
    };
    ProgressFn report;
    if (progress) {
        report = [&](std::size_t done, std::size_t total) {
            log << "\rtrajectories " << done << '/' << total << std::flush;
            if (done == total) log << '\n';
        };
    }
    log << "running " << run.n_samples << " " << to_string(run.mode) << " trajectories, k_max=" << run.k_max
        << ", threads=" << thread_count() << '\n';
    try {
        const EnsembleResult r = run_ensemble_nested(run, {}, report).back();
        write(r);
        const auto sz = observable_series(r, pauli_z());
        double max_se = 0.0;
        for (double s : sz.stderr_) max_se = std::max(max_se, s);
        out << "label " << cfg.label << "\nsamples " << r.n_samples << " (failed " << r.failures.size() << ")\n"
            << "final <sigma_z> " << sz.value.back() << " +- " << sz.stderr_.back() << "\nmax stderr " << max_se
            << "\nmax |tr rho - 1| ";
        double tr = 0.0;
        for (const auto& rho : r.rho_series) tr = std::max(tr, std::abs(rho.trace() - 1.0));
        out << tr << "\nwall time " << r.wall_time << " s\nwrote " << stem << ".csv\n";
        return kOk;
    } catch (const EnsembleError& e) {
        write(e.partial());
        log << "error: " << e.what() << '\n';
        for (const auto& f : e.partial().failures)
            log << "  trajectory " << f.index << " at t=" << f.time << ": " << f.message << '\n';
        return kEnsembleFailure;
    }
}

int cmd_me(const CliConfig& cfg, std::ostream& out, std::ostream& log) {
    const auto dec = decompose_l(cfg.params);
    if (dec.l_0.norm() == 0.0) log << "l_0 = 0: the omega=0 channel is inactive\n";
    CMatrix rho0 = cfg.run.model.psi0 * cfg.run.model.psi0.adjoint();
    MeResult r;
    try {
        r = propagate_me(cfg.params, rho0, cfg.run.t_grid, cfg.me);
    } catch (const DomainError& e) {
        log << "error: " << e.what() << '\n';
        return kConfigError;
    }
    const std::string path = cfg.output_stem() + "_me_" + to_string(cfg.me.variant) + ".csv";
    auto os = open_output(path);
    write_me_csv(os, r);
    const auto sz = sigma_z_series(r);
    out << "label " << cfg.label << "\nvariant " << to_string(cfg.me.variant) << "\nfinal <sigma_z> " << sz.back()
        << "\nwrote " << path << '\n';
    return kOk;
}

int cmd_compare(const std::string& a, const std::string& b, double tol, double t_min, double t_max,
                std::ostream& out) {
    auto load = [](const std::string& path) {
        std::ifstream is(path);
        if (!is) throw ConfigError("cannot open " + path);
        return read_sigma_z_csv(is);
    };
    const auto c = compare_series(load(a), load(b), t_min, t_max);
    const bool pass = c.max_deviation <= tol;
    out << "points " << c.points << "\nmax_deviation " << c.max_deviation << "\nrms_deviation " << c.rms_deviation
        << "\ntolerance " << tol << "\n" << (pass ? "PASS" : "FAIL") << '\n';
    return pass ? kOk : kFailure;
}

int cmd_configs(const std::string& show, std::ostream& out) {
    if (!show.empty()) {
        out << json(find_named(show)).dump(2) << '\n';
        return kOk;
    }
    for (const auto& c : named_configs()) out << std::left << std::setw(22) << c.label << ' ' << c.description << '\n';
    return kOk;
}

}  // namespace hops::cli
