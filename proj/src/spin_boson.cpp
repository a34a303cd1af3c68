// spin_boson.cpp - the spin-boson benchmark model and named run configurations

#include "hopskit/spin_boson.hpp"

#include <cmath>
#include <cstdio>

namespace hops {

SystemModel make_spin_boson(double epsilon, double delta) {
    if (epsilon == 0.0 && delta == 0.0) throw DomainError("make_spin_boson: epsilon and delta both zero");
    CVector up(2);
    up << 1.0, 0.0;
    return SystemModel::make(epsilon * pauli_z() + delta * pauli_x(), pauli_z(), up);
}

const char* to_string(FitKernel k) noexcept {
    switch (k) {
        case FitKernel::zero_temperature: return "zero_temperature";
        case FitKernel::full_thermal: return "full_thermal";
        case FitKernel::real_thermal: return "real_thermal";
    }
    return "?";
}

FitKernel fit_kernel_from_string(const std::string& s) {
    if (s == "zero_temperature") return FitKernel::zero_temperature;
    if (s == "full_thermal") return FitKernel::full_thermal;
    if (s == "real_thermal") return FitKernel::real_thermal;
    throw ConfigError("unknown fit kernel '" + s + "' (zero_temperature, full_thermal, real_thermal)");
}

SampledKernel fit_target(const FitSpec& spec, const OhmicSpectralDensity& sd, double beta) {
    if (!(spec.tau0 > 0.0)) throw DomainError("fit_target: tau0 must be > 0");
    if (spec.kernel != FitKernel::zero_temperature && !(beta > 0.0 && std::isfinite(beta)))
        throw DomainError("fit_target: thermal kernels need a finite beta > 0");
    std::function<cplx(double)> kernel;
    switch (spec.kernel) {
        case FitKernel::zero_temperature: kernel = [&](double t) { return bcf_zero_temp(sd, t); }; break;
        case FitKernel::full_thermal: kernel = [&](double t) { return bcf_full_temp(sd, beta, t); }; break;
        case FitKernel::real_thermal:
            kernel = [&](double t) { return cplx(bcf_full_temp(sd, beta, t).real(), 0.0); };
            break;
    }
    return SampledKernel::sample(kernel, spec.tau0, spec.grid_points);
}

FitResult fit_for(const FitSpec& spec, const OhmicSpectralDensity& sd, double beta) {
    FitOptions options;
    options.restarts = spec.restarts;
    options.seed = spec.seed;
    options.max_rate = spec.max_rate;
    options.omega_scale = sd.omega_c;
    return fit_bcf(fit_target(spec, sd, beta), spec.n_terms, spec.p, options);
}

namespace {

std::vector<double> uniform_grid(double t_end, double dt) {
    const auto n = static_cast<int>(std::lround(t_end / dt));
    std::vector<double> t(n + 1);
    for (int i = 0; i <= n; ++i) t[i] = t_end * i / n;
    return t;
}

struct Recipe {
    std::string label;
    std::string description;
    double epsilon{0.0};
    double s{1.0}, omega_c{1.0}, alpha{0.0};
    double temperature{0.0};
    FitSpec fit;
    int k_max{4};
    std::size_t n_samples{10'000};
    Mode mode{Mode::nonlinear};
    ThermalMethod method{ThermalMethod::shift};
    double t_end{15.0};
    double dt{0.05};
    std::string reference;
};

NamedConfig build(const Recipe& r) {
    NamedConfig c;
    c.label = r.label;
    c.description = r.description;
    c.params.epsilon = r.epsilon;
    c.params.delta = 1.0;
    c.params.sd = OhmicSpectralDensity::make(r.s, r.omega_c, r.alpha);
    c.params.beta = r.temperature > 0.0 ? 1.0 / r.temperature : kInfiniteBeta;
    c.fit = r.fit;
    // rates beyond a few cutoffs only stiffen the hierarchy
    if (c.fit.max_rate == 0.0) c.fit.max_rate = 5.0 * r.omega_c;
    c.run.model = make_spin_boson(r.epsilon, 1.0);
    c.run.sd = c.params.sd;
    c.run.mode = r.mode;
    c.run.k_max = r.k_max;
    c.run.n_samples = r.n_samples;
    c.run.master_seed = 1;
    if (r.temperature > 0.0) {
        ThermalConfig th;
        th.beta = c.params.beta;
        c.run.thermal = th;
    }
    c.run.thermal_method = r.method;
    c.run.t_grid = uniform_grid(r.t_end, r.dt);
    c.reference = r.reference;
    return c;
}

FitSpec spec(FitKernel kernel, int n, double tau0, double tol) {
    FitSpec f;
    f.kernel = kernel;
    f.n_terms = n;
    f.tau0 = tau0;
    f.max_rel_error = tol;
    return f;
}

std::string fmt(const char* pattern, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

}  // namespace

std::vector<NamedConfig> named_configs() {
    std::vector<Recipe> recipes;
    const auto zero_t = FitKernel::zero_temperature;

    // Ohmic weak coupling against the constant-rate master equation
    for (auto [eps, temp] : {std::pair{0.0, 0.0}, {0.0, 1.0}, {0.0, 10.0}, {1.0, 1.0}, {10.0, 1.0}}) {
        Recipe r;
        r.label = "fig3-eps" + fmt("%g", eps) + "-T" + fmt("%g", temp);
        r.description = "Ohmic weak coupling, HOPS vs constant-rate master equation";
        r.epsilon = eps, r.s = 1.0, r.omega_c = 100.0, r.alpha = 0.01, r.temperature = temp;
        r.fit = spec(zero_t, 6, 0.5, 4e-3);
        r.k_max = 2;
        r.reference = "fixtures/me/" + r.label + ".csv";
        recipes.push_back(r);
    }
    // sub-Ohmic weak coupling against the extended master equation
    for (auto [eps, temp] : {std::pair{0.0, 0.0}, {0.0, 1.0}, {1.0, 0.0}, {1.0, 1.0}}) {
        Recipe r;
        r.label = "fig4-eps" + fmt("%g", eps) + "-T" + fmt("%g", temp);
        r.description = "sub-Ohmic weak coupling, HOPS vs extended master equation";
        r.epsilon = eps, r.s = 0.8, r.omega_c = 100.0, r.alpha = 0.01 * std::pow(100.0, -0.2), r.temperature = temp;
        r.fit = spec(zero_t, 6, 0.5, 7e-3);
        r.k_max = 2;
        r.reference = "fixtures/me/" + r.label + ".csv";
        recipes.push_back(r);
    }
    // high temperature, thermal noise dominated
    {
        Recipe r;
        r.label = "fig5-left";
        r.description = "high temperature, unbiased, thermal shift";
        r.s = 0.5, r.omega_c = 0.531, r.alpha = 0.266, r.temperature = 2.09;
        r.fit = spec(zero_t, 4, 10.0, 1e-2);
        r.k_max = 5;
        r.t_end = 10.0;
        r.reference = "fixtures/stoch_ham/fig5-left.csv";
        recipes.push_back(r);
        r.label = "fig5-right";
        r.omega_c = 1.33, r.alpha = 0.106, r.temperature = 5.21;
        r.reference = "fixtures/stoch_ham/fig5-right.csv";
        recipes.push_back(r);
        r.label = "fig5-right-real";
        r.description = "high temperature, unbiased, fit of the real thermal kernel";
        r.fit = spec(FitKernel::real_thermal, 4, 10.0, 1e-2);
        r.method = ThermalMethod::real_kernel;
        recipes.push_back(r);

        Recipe b;
        b.label = "fig6";
        b.description = "high temperature, biased, thermal shift";
        b.epsilon = 2.5, b.s = 0.5, b.omega_c = 1.65, b.alpha = 0.0106, b.temperature = 10.4;
        b.fit = spec(zero_t, 4, 10.0, 1e-2);
        b.k_max = 5;
        b.t_end = 10.0;
        b.reference = "fixtures/stoch_ham/fig6.csv";
        recipes.push_back(b);
        b.label = "fig6-real";
        b.description = "high temperature, biased, fit of the real thermal kernel";
        b.fit = spec(FitKernel::real_thermal, 4, 10.0, 1e-2);
        b.method = ThermalMethod::real_kernel;
        recipes.push_back(b);
    }
    // strong coupling sub-Ohmic family
    auto strong = [](double alpha, double temp) {
        Recipe r;
        r.epsilon = 0.0, r.s = 0.5, r.omega_c = 10.0, r.alpha = alpha, r.temperature = temp;
        r.fit = spec(FitKernel::zero_temperature, 5, 15.0, 0.02);
        r.t_end = 40.0;
        r.dt = 0.1;
        return r;
    };
    {
        Recipe r = strong(0.15, 1.0);
        r.label = "fig2-thermal-shift";
        r.description = "finite temperature via the stochastic Hamiltonian shift";
        r.k_max = 4;
        r.t_end = 15.0;
        recipes.push_back(r);
        r.label = "fig2-thermal-kernel";
        r.description = "finite temperature via a fit of the full thermal kernel";
        r.fit = spec(FitKernel::full_thermal, 5, 15.0, 0.02);
        r.method = ThermalMethod::full_kernel;
        r.k_max = 8;
        recipes.push_back(r);
    }
    for (Mode m : {Mode::nonlinear, Mode::linear}) {
        Recipe r = strong(0.2, 0.0);
        r.label = std::string("fig7-") + to_string(m);
        r.description = "linear vs nonlinear sampling at strong coupling";
        r.mode = m;
        r.k_max = 9;
        r.n_samples = 5'000;
        recipes.push_back(r);
    }
    for (auto [tau0, n, tol] : {std::tuple{2.0, 5, 3e-3}, {15.0, 5, 0.02}, {40.0, 6, 0.02}}) {
        Recipe r = strong(0.2, 0.0);
        r.label = "fig8-tau" + fmt("%g", tau0);
        r.description = "fit horizon effect at strong coupling";
        r.fit = spec(FitKernel::zero_temperature, n, tau0, tol);
        r.k_max = 9;
        r.n_samples = 20'000;
        recipes.push_back(r);
    }
    for (auto [alpha, depth] : {std::pair{0.1, 5}, {0.15, 6}, {0.2, 9}, {0.25, 12}}) {
        for (double temp : {0.0, 0.2, 1.0}) {
            Recipe r = strong(alpha, temp);
            r.label = "fig10-alpha" + fmt("%03.0f", alpha * 100.0) + "-T" + fmt("%g", temp);
            r.description = "strong coupling, coherent motion to localization";
            r.k_max = depth;
            r.n_samples = 100'000;
            if (temp == 0.0) r.reference = "fixtures/mlmctdh/" + r.label + ".csv";
            recipes.push_back(r);
        }
    }

    std::vector<NamedConfig> out;
    out.reserve(recipes.size());
    for (const auto& r : recipes) out.push_back(build(r));
    return out;
}

NamedConfig find_named(const std::string& label) {
    for (auto& c : named_configs())
        if (c.label == label) return c;
    throw ConfigError("unknown named configuration '" + label + "' (see 'hopskit configs')");
}

}  // namespace hops
