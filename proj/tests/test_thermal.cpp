// Unit tests for the stochastic thermal shift.

#include "doctest.h"

#include <cmath>
#include <random>

#include "hopskit/bcf.hpp"
#include "hopskit/thermal.hpp"

using namespace hops;

namespace {

CMatrix pauli_z() {
    CMatrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

CMatrix pauli_x() {
    CMatrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

SystemModel spin(double eps, double delta) {
    CVector up(2);
    up << 1, 0;
    return SystemModel::make(eps * pauli_z() + delta * pauli_x(), pauli_z(), up);
}

}  // namespace

TEST_CASE("shifted Hamiltonian") {
    const auto m = spin(0.7, 1.0);
    CHECK((shifted_hamiltonian(m, 0.0) - m.h_sys).norm() == 0.0);
    const CMatrix h = shifted_hamiltonian(m, cplx(0.3, 0.4));
    CHECK((h - (m.h_sys + 0.6 * pauli_z())).norm() < 1e-15);

    std::mt19937_64 rng(5);
    std::normal_distribution<double> n;
    for (int r = 0; r < 20; ++r) {
        CMatrix l(3, 3);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) l(i, j) = cplx(n(rng), n(rng));
        CVector psi = CVector::Zero(3);
        psi(0) = 1.0;
        const auto model = SystemModel::make(CMatrix::Identity(3, 3), l, psi);
        const CMatrix s = shifted_hamiltonian(model, cplx(n(rng), n(rng)));
        CHECK((s - s.adjoint()).norm() < 1e-14);
    }
}

TEST_CASE("force autocorrelation is the temperature part of the full kernel") {
    const auto sd = OhmicSpectralDensity::make(0.5, 10.0, 0.15);
    const double beta = 1.0;
    for (double tau : {0.0, 0.1, 0.7, 3.0, 12.0}) {
        const double f = thermal_force_autocorrelation(sd, beta, tau);
        const double split = (bcf_full_temp(sd, beta, tau) - bcf_zero_temp(sd, tau)).real();
        CHECK(f == doctest::Approx(split).epsilon(1e-7).scale(1e-9));
        CHECK(f == thermal_force_autocorrelation(sd, beta, -tau));
        // the assembled kernel z + y + y* reproduces the full correlation exactly
        const cplx k = thermal_kernel(sd, beta, tau);
        const cplx assembled = bcf_zero_temp(sd, tau) + k + std::conj(k);
        CHECK(std::abs(assembled - bcf_full_temp(sd, beta, tau)) < 1e-7 * std::abs(bcf_full_temp(sd, beta, 0.0)));
    }
    CHECK(thermal_force_autocorrelation(sd, beta, 0.0) > 0.0);
    CHECK_THROWS_AS(thermal_force_autocorrelation(sd, 0.0, 1.0), DomainError);
}

TEST_CASE("thermal configuration and disabled process") {
    const auto sd = OhmicSpectralDensity::make(0.5, 10.0, 0.15);
    ThermalConfig cfg;
    CHECK_FALSE(cfg.enabled());
    CHECK_FALSE(make_thermal_process(sd, cfg, 10.0, 1).has_value());
    CHECK(make_thermal_plan(sd, cfg, 10.0) == nullptr);
    CHECK_FALSE(thermal_shift(spin(0, 1), nullptr));

    cfg.beta = -1.0;
    CHECK_THROWS_AS(make_thermal_plan(sd, cfg, 10.0), DomainError);
    cfg.beta = 1.0;
    cfg.noise_abstol = 0.0;
    CHECK_THROWS_AS(make_thermal_plan(sd, cfg, 10.0), DomainError);
}

TEST_CASE("sampled thermal process matches the quadrature kernel") {
    const auto sd = OhmicSpectralDensity::make(0.5, 10.0, 0.15);
    ThermalConfig cfg;
    cfg.beta = 1.0;
    cfg.noise_abstol = 1e-2;
    cfg.seed_offset = 17;
    const double t_max = 5.0;
    const auto plan = make_thermal_plan(sd, cfg, t_max);
    REQUIRE(plan);

    // seed offset shifts the seed, not the stream
    const auto a = make_thermal_process(sd, cfg, t_max, 3, 9);
    const auto b = sample_process(plan, 20, 9);
    REQUIRE(a);
    CHECK(a->values()[11] == b.values()[11]);

    const int M = 10000;
    const double bound = 5.0 * thermal_kernel(sd, cfg.beta, 0.0).real() / std::sqrt(M);
    const std::vector<double> t{0.0, 0.6, 1.5, 3.2, 5.0};
    std::vector<cplx> corr(t.size() * t.size(), 0.0), pseudo(corr.size(), 0.0);
    for (int r = 0; r < M; ++r) {
        const auto y = sample_process(plan, 99, r);
        std::vector<cplx> v;
        for (double ti : t) v.push_back(y(ti));
        for (std::size_t i = 0; i < t.size(); ++i)
            for (std::size_t j = 0; j < t.size(); ++j) {
                corr[i * t.size() + j] += v[i] * std::conj(v[j]);
                pseudo[i * t.size() + j] += v[i] * v[j];
            }
    }
    for (std::size_t i = 0; i < t.size(); ++i)
        for (std::size_t j = 0; j < t.size(); ++j) {
            const double tau = t[i] - t[j];
            const cplx k = tau >= 0 ? thermal_kernel(sd, cfg.beta, tau) : std::conj(thermal_kernel(sd, cfg.beta, -tau));
            CHECK(std::abs(corr[i * t.size() + j] / double(M) - k) < cfg.noise_abstol + bound);
            CHECK(std::abs(pseudo[i * t.size() + j] / double(M)) < bound);
        }
}

TEST_CASE("composite noises carry the full and the real thermal kernels") {
    const auto sd = OhmicSpectralDensity::make(0.5, 2.0, 0.2);
    const double beta = 0.5, t_max = 4.0, abstol = 5e-3;
    const auto zp = std::make_shared<NoisePlan>(plan_noise(zero_temp_spectrum(sd), t_max, abstol));
    const auto yp = std::make_shared<NoisePlan>(plan_noise(thermal_noise_spectrum(sd, beta), t_max, abstol));

    const int M = 6000;
    const std::vector<double> lags{0.0, 0.8, 2.5};
    std::vector<cplx> full(lags.size(), 0.0), real(lags.size(), 0.0);
    for (int r = 0; r < M; ++r) {
        auto p = [&](const std::shared_ptr<NoisePlan>& plan, int stream) {
            return std::make_shared<const StochasticProcess>(sample_process(plan, 5, 4 * r + stream));
        };
        const auto z0 = p(zp, 0), z1 = p(zp, 1), y1 = p(yp, 2), y2 = p(yp, 3);
        const auto f = full_temperature_noise(z0, y1, y2);
        const auto g = real_kernel_noise(z0, z1, y1, y2);
        for (std::size_t k = 0; k < lags.size(); ++k) {
            full[k] += f(1.0 + lags[k]) * std::conj(f(1.0));
            real[k] += g(1.0 + lags[k]) * std::conj(g(1.0));
        }
    }
    const double scale = bcf_full_temp(sd, beta, 0.0).real();
    const double bound = 4.0 * abstol + 5.0 * scale / std::sqrt(M);
    for (std::size_t k = 0; k < lags.size(); ++k) {
        const cplx target = bcf_full_temp(sd, beta, lags[k]);
        CHECK(std::abs(full[k] / double(M) - target) < bound);
        CHECK(std::abs(real[k] / double(M) - target.real()) < bound);
    }
}

TEST_CASE("the thermal shift only changes the system Hamiltonian input") {
    const auto m = spin(0.3, 1.0);
    const ExponentialBCF e = ExponentialBCF::make({{cplx(0.4, -0.1), cplx(1.5, 2.0)}, {cplx(0.2, 0.05), cplx(0.7, -1.0)}});
    const NoiseFn z = [](double t) { return cplx(0.2 * std::sin(t), 0.1 * std::cos(3 * t)); };
    std::vector<double> grid;
    for (int i = 0; i <= 40; ++i) grid.push_back(0.1 * i);
    const cplx y0(0.25, -0.1);
    const HamiltonianShift shift = [&](double) -> CMatrix { return shifted_hamiltonian(m, y0) - m.h_sys; };
    const auto shifted_model = SystemModel::make(shifted_hamiltonian(m, y0), m.coupling_l, m.psi0);
    for (Mode mode : {Mode::linear, Mode::nonlinear}) {
        const auto a = propagate_trajectory(m, e, z, mode, 3, grid, {}, shift);
        const auto b = propagate_trajectory(shifted_model, e, z, mode, 3, grid);
        for (std::size_t i = 0; i < grid.size(); ++i) CHECK((a.psi0_series[i] - b.psi0_series[i]).norm() < 1e-12);
    }
}
