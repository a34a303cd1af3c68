// stocproc.cpp - stationary complex Gaussian processes by spectral sampling

#include "hopskit/stocproc.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <string>

#include <fftw3.h>

#include "hopskit/quadrature.hpp"
#include "hopskit/random.hpp"

namespace hops {

Spectrum zero_temp_spectrum(const OhmicSpectralDensity& sd) {
    Spectrum s;
    s.density = [sd](double w) { return sd(w); };
    s.scale = sd.omega_c;
    s.origin_power = std::min(1.0, sd.s);
    s.exact_bcf = [sd](double tau) { return bcf_zero_temp(sd, tau); };
    return s;
}

Spectrum thermal_noise_spectrum(const OhmicSpectralDensity& sd, double beta) {
    if (!(beta > 0.0) || std::isinf(beta))
        throw DomainError("thermal_noise_spectrum: beta must be finite and > 0");
    Spectrum s;
    s.density = [sd, beta](double w) { return bose(beta * w) * sd(w); };
    s.scale = std::min(sd.omega_c, 1.0 / beta);
    // n̄ J ~ ω^{s-1} near the origin
    s.origin_power = std::min(1.0, sd.s);
    return s;
}

namespace {

// In-place forward DFT, Σ_k x_k e^{-2πi kl/n}. Plans are cached per length;
// FFTW planning is not thread-safe but executing a shared plan on new arrays is.
void fft_forward(std::vector<cplx>& data) {
    static std::mutex mutex;
    static std::map<std::size_t, fftw_plan> plans;
    const std::size_t n = data.size();
    fftw_plan plan;
    {
        std::lock_guard lock(mutex);
        auto it = plans.find(n);
        if (it == plans.end()) {
            std::vector<cplx> scratch(n);
            auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
            plan = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
            if (plan == nullptr) throw std::runtime_error("FFTW could not plan length " + std::to_string(n));
            it = plans.emplace(n, plan).first;
        }
        plan = it->second;
    }
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plan, buf, buf);
}

// Σ_k w_k e^{-ikΔω τ}; the phasor recurrence is reseeded every 256 terms.
cplx phasor_sum(const std::vector<double>& w, double d_omega, double tau) {
    constexpr std::size_t kReseed = 256;
    const cplx step = std::polar(1.0, -d_omega * tau);
    cplx sum{0.0, 0.0};
    cplx phase{1.0, 0.0};
    for (std::size_t k = 0; k < w.size(); ++k) {
        if (k % kReseed == 0) phase = std::polar(1.0, -static_cast<double>(k) * d_omega * tau);
        sum += w[k] * phase;
        phase *= step;
    }
    return sum;
}

// c_k = Δω S(ω_k) for k ≥ 1; c_0 integrates S over [0, Δω/2].
std::vector<double> node_weights(const Spectrum& s, double d_omega, std::size_t n_nodes) {
    std::vector<double> c(n_nodes);
    c[0] = quad::integrate_from_zero(s.density, 0.5 * d_omega, s.origin_power);
    for (std::size_t k = 1; k < n_nodes; ++k) c[k] = d_omega * s.density(static_cast<double>(k) * d_omega);
    return c;
}

// Largest spline error of the sampled α_apx between nodes in [0, t_max].
double interpolation_error(const std::vector<double>& c, double d_omega, std::size_t n, double d_t, double t_max) {
    std::vector<cplx> nodes(n, cplx{0.0, 0.0});
    std::vector<cplx> mids(n, cplx{0.0, 0.0});
    const cplx half_step = std::polar(1.0, -0.5 * d_omega * d_t);
    cplx shift{1.0, 0.0};
    for (std::size_t k = 0; k < c.size(); ++k) {
        if (k % 256 == 0) shift = std::polar(1.0, -0.5 * static_cast<double>(k) * d_omega * d_t);
        nodes[k] = c[k] / kPi;
        mids[k] = nodes[k] * shift;
        shift *= half_step;
    }
    fft_forward(nodes);
    fft_forward(mids);
    nodes.push_back(nodes.front());
    const UniformCubicSpline spline(std::move(nodes), d_t);
    double err = 0.0;
    for (std::size_t l = 0; l < n && static_cast<double>(l) * d_t < t_max; ++l) {
        const double t = (static_cast<double>(l) + 0.5) * d_t;
        err = std::max(err, std::abs(spline(t) - mids[l]));
    }
    return err;
}

}  // namespace

cplx NoisePlan::reconstructed_bcf(double tau) const {
    std::vector<double> c(amplitudes->size());
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = kPi * (*amplitudes)[k] * (*amplitudes)[k];
    return std::polar(1.0, -omega_0 * tau) * phasor_sum(c, d_omega, tau) / kPi;
}

NoisePlan plan_noise(const Spectrum& spectrum, double t_max, double abstol, const PlanOptions& options) {
    if (!(abstol > 0.0)) throw DomainError("plan_noise: abstol must be > 0");
    if (!(t_max > 0.0)) throw DomainError("plan_noise: t_max must be > 0");
    if (!spectrum.density) throw DomainError("plan_noise: spectrum has no density");
    if (options.check_points < 2) throw DomainError("plan_noise: need at least two check points");

    auto shared = std::make_shared<const Spectrum>(spectrum);
    const double omega_1 = quad::cutoff_frequency(spectrum.density, spectrum.scale);

    const std::size_t m = options.check_points;
    std::vector<double> tau(m);
    std::vector<cplx> reference(m);
    const quad::Panels panels{omega_1, spectrum.scale, spectrum.scale, spectrum.origin_power};
    for (std::size_t j = 0; j < m; ++j) {
        tau[j] = t_max * static_cast<double>(j) / static_cast<double>(m - 1);
        reference[j] = spectrum.exact_bcf ? spectrum.exact_bcf(tau[j])
                                          : quad::fourier_half_line(spectrum.density, tau[j], panels) / kPi;
    }

    const double d_omega0 = kPi / t_max;
    // Δt starts near π/ω_1; n0 is the power of two that realizes n·Δω·Δt = 2π
    const std::size_t n0 = std::bit_ceil(static_cast<std::size_t>(std::ceil(2.0 * omega_1 * t_max / kPi)) + 1);

    int halve_omega = 0, halve_t = 0;
    double riemann = std::numeric_limits<double>::infinity();
    double interp = std::numeric_limits<double>::infinity();
    std::vector<double> c;
    int weights_for = -1;
    for (;;) {
        const std::size_t n = n0 << (halve_omega + halve_t);
        if (n > options.node_budget || (n >> (halve_omega + halve_t)) != n0) {
            throw PlanError("plan_noise: tolerance " + std::to_string(abstol) + " not reached within " +
                                std::to_string(options.node_budget) + " nodes (Riemann error " +
                                std::to_string(riemann) + ", interpolation error " + std::to_string(interp) + ")",
                            riemann, interp);
        }
        const double d_omega = d_omega0 / static_cast<double>(std::size_t{1} << halve_omega);
        const double d_t = 2.0 * kPi / (static_cast<double>(n) * d_omega);

        if (weights_for != halve_omega) {
            const auto n_nodes = static_cast<std::size_t>(std::floor(omega_1 / d_omega)) + 1;
            c = node_weights(spectrum, d_omega, n_nodes);
            riemann = 0.0;
            for (std::size_t j = 0; j < m; ++j)
                riemann = std::max(riemann, std::abs(phasor_sum(c, d_omega, tau[j]) / kPi - reference[j]));
            weights_for = halve_omega;
        }
        interp = interpolation_error(c, d_omega, n, d_t, t_max);

        const bool riemann_ok = riemann < abstol;
        const bool interp_ok = interp < abstol;
        if (riemann_ok && interp_ok) {
            NoisePlan plan;
            plan.omega_0 = 0.0;
            plan.d_omega = d_omega;
            plan.n = n;
            plan.n_nodes = c.size();
            plan.d_t = d_t;
            plan.t_max = t_max;
            plan.abstol = abstol;
            plan.omega_1 = omega_1;
            plan.riemann_error = riemann;
            plan.interpolation_error = interp;
            plan.spectrum = shared;
            auto amps = std::make_shared<std::vector<double>>(c.size());
            for (std::size_t k = 0; k < c.size(); ++k) (*amps)[k] = std::sqrt(c[k] / kPi);
            plan.amplitudes = std::move(amps);
            return plan;
        }
        if (!riemann_ok) ++halve_omega;
        if (!interp_ok) ++halve_t;
    }
}

StochasticProcess::StochasticProcess(std::shared_ptr<const NoisePlan> plan, std::vector<cplx> values,
                                     std::uint64_t seed)
    : plan_(std::move(plan)), seed_(seed) {
    if (values.size() != plan_->n) throw DomainError("process length does not match its plan");
    // the Riemann-sum process is periodic in n·Δt; close the last interval
    values.push_back(values.front());
    spline_ = UniformCubicSpline(std::move(values), plan_->d_t);
}

StochasticProcess process_from_gaussians(std::shared_ptr<const NoisePlan> plan, std::span<const cplx> y,
                                         std::uint64_t seed) {
    if (!plan) throw DomainError("process_from_gaussians: null plan");
    const auto& amps = *plan->amplitudes;
    if (y.size() != amps.size()) throw DomainError("process_from_gaussians: need one Y per node");
    std::vector<cplx> data(plan->n, cplx{0.0, 0.0});
    for (std::size_t k = 0; k < amps.size(); ++k) data[k] = amps[k] * y[k];
    fft_forward(data);
    if (plan->omega_0 != 0.0) {
        for (std::size_t l = 0; l < data.size(); ++l)
            data[l] *= std::polar(1.0, -plan->omega_0 * static_cast<double>(l) * plan->d_t);
    }
    return StochasticProcess(std::move(plan), std::move(data), seed);
}

StochasticProcess sample_process(std::shared_ptr<const NoisePlan> plan, std::uint64_t seed, std::uint64_t stream) {
    if (!plan) throw DomainError("sample_process: null plan");
    auto rng = make_engine(seed, stream);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<cplx> y(plan->n_nodes);
    const double r = 1.0 / std::sqrt(2.0);
    for (auto& v : y) {
        const double re = normal(rng);
        const double im = normal(rng);
        v = cplx(re * r, im * r);
    }
    return process_from_gaussians(std::move(plan), y, seed);
}

namespace {

void put_u64(std::ostream& os, std::uint64_t v) {
    char bytes[8];
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    os.write(bytes, 8);
}

std::uint64_t get_u64(std::istream& is) {
    unsigned char bytes[8];
    if (!is.read(reinterpret_cast<char*>(bytes), 8)) throw ConfigError("read_process: truncated stream");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
    return v;
}

}  // namespace

void write_process(std::ostream& os, const StochasticProcess& p) {
    const auto values = p.values();
    put_u64(os, values.size());
    put_u64(os, std::bit_cast<std::uint64_t>(p.plan().d_t));
    put_u64(os, p.seed());
    for (const auto& z : values) {
        put_u64(os, std::bit_cast<std::uint64_t>(z.real()));
        put_u64(os, std::bit_cast<std::uint64_t>(z.imag()));
    }
}

ProcessDump read_process(std::istream& is) {
    ProcessDump d;
    d.n = get_u64(is);
    d.d_t = std::bit_cast<double>(get_u64(is));
    d.seed = get_u64(is);
    d.values.resize(d.n);
    for (auto& z : d.values) {
        const double re = std::bit_cast<double>(get_u64(is));
        const double im = std::bit_cast<double>(get_u64(is));
        z = cplx(re, im);
    }
    return d;
}

}  // namespace hops
