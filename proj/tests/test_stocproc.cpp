// Unit tests for the spline and the spectral noise generator.

#include "doctest.h"

#include <cmath>
#include <map>
#include <sstream>
#include <vector>

#include "hopskit/bcf.hpp"
#include "hopskit/stocproc.hpp"

using namespace hops;

namespace {

std::shared_ptr<const NoisePlan> unit_ohmic_plan(double abstol = 1e-3) {
    static std::map<double, std::shared_ptr<const NoisePlan>> cache;
    auto& p = cache[abstol];
    if (!p) p = std::make_shared<NoisePlan>(plan_noise(zero_temp_spectrum(OhmicSpectralDensity::make(1, 1, 1)), 10.0, abstol));
    return p;
}

}  // namespace

TEST_CASE("spline is exact at nodes and smooth between them") {
    std::vector<cplx> z;
    for (int i = 0; i <= 40; ++i) z.emplace_back(std::sin(0.3 * i), std::cos(0.17 * i * i / 10.0));
    const UniformCubicSpline s(z, 0.25);
    for (int i = 0; i <= 40; ++i) CHECK(s(0.25 * i) == z[i]);

    // first derivative continuous across interior nodes
    const double h = 1e-6;
    for (int i = 1; i < 40; ++i) {
        const double t = 0.25 * i;
        const cplx left = (s(t) - s(t - h)) / h;
        const cplx right = (s(t + h) - s(t)) / h;
        CHECK(std::abs(left - right) < 1e-4);
    }
    // linear data is reproduced exactly by a natural spline
    std::vector<cplx> line;
    for (int i = 0; i < 10; ++i) line.emplace_back(2.0 * i, -0.5 * i);
    const UniformCubicSpline l(line, 1.0);
    CHECK(std::abs(l(3.7) - cplx(7.4, -1.85)) < 1e-13);

    CHECK_THROWS_AS(s(-1e-9), DomainError);
    CHECK_THROWS_AS(s(10.0 + 1e-9), DomainError);
    CHECK_THROWS_AS(UniformCubicSpline({cplx(1.0)}, 1.0), DomainError);
}

TEST_CASE("plan satisfies both tolerance checks on a fine oracle grid") {
    const auto sd = OhmicSpectralDensity::make(1, 1, 1);
    const double t_max = 10.0, abstol = 1e-3;
    const auto plan = unit_ohmic_plan(abstol);
    CHECK(plan->n * plan->d_omega * plan->d_t == doctest::Approx(2.0 * kPi).epsilon(1e-14));
    CHECK(static_cast<double>(plan->n) * plan->d_t >= t_max);
    CHECK((plan->n & (plan->n - 1)) == 0);

    // Oracle: midpoint sum with a ten times finer frequency step, plus the closed form.
    const double fine = plan->d_omega / 10.0;
    auto oracle = [&](double tau) {
        cplx sum{0.0, 0.0};
        for (double w = 0.5 * fine; w < plan->omega_1; w += fine) sum += sd(w) * std::polar(1.0, -w * tau);
        return sum * fine / kPi;
    };
    const int points = static_cast<int>(10 * t_max);
    for (int j = 0; j <= points; ++j) {
        const double tau = t_max * j / points;
        const cplx apx = plan->reconstructed_bcf(tau);
        CHECK(std::abs(apx - oracle(tau)) < abstol);
        CHECK(std::abs(apx - bcf_zero_temp(sd, tau)) < abstol);
    }

    // interpolation check: spline through α_apx(t_l) against α_apx at midpoints
    std::vector<cplx> nodes;
    const auto last = static_cast<std::size_t>(std::ceil(t_max / plan->d_t)) + 2;
    for (std::size_t l = 0; l <= last; ++l) nodes.push_back(plan->reconstructed_bcf(l * plan->d_t));
    const UniformCubicSpline s(nodes, plan->d_t);
    double worst = 0.0;
    for (std::size_t l = 0; (l + 0.5) * plan->d_t <= t_max; ++l) {
        const double t = (l + 0.5) * plan->d_t;
        worst = std::max(worst, std::abs(s(t) - plan->reconstructed_bcf(t)));
    }
    CHECK(worst < abstol);
}

TEST_CASE("tighter tolerance never shrinks the plan") {
    const auto spec = zero_temp_spectrum(OhmicSpectralDensity::make(0.5, 10.0, 0.2));
    std::size_t previous = 0;
    std::size_t previous_nodes = 0;
    for (double tol : {1e-1, 5e-2, 2.5e-2, 1.25e-2, 6e-3, 3e-3, 1.5e-3}) {
        const auto plan = plan_noise(spec, 20.0, tol);
        CHECK(plan.n >= previous);
        CHECK(plan.n_nodes >= previous_nodes);
        CHECK(plan.riemann_error < tol);
        CHECK(plan.interpolation_error < tol);
        previous = plan.n;
        previous_nodes = plan.n_nodes;
    }
}

TEST_CASE("plan errors") {
    const auto spec = zero_temp_spectrum(OhmicSpectralDensity::make(1, 1, 1));
    CHECK_THROWS_AS(plan_noise(spec, 10.0, 0.0), DomainError);
    CHECK_THROWS_AS(plan_noise(spec, 0.0, 1e-3), DomainError);
    PlanOptions tiny;
    tiny.node_budget = 256;
    try {
        plan_noise(spec, 10.0, 1e-6, tiny);
        FAIL("expected PlanError");
    } catch (const PlanError& e) {
        CHECK(e.riemann_error >= 0.0);
        CHECK(e.interpolation_error > 0.0);
    }
}

TEST_CASE("process evaluation") {
    const auto plan = unit_ohmic_plan();
    const auto p = sample_process(plan, 11);
    REQUIRE(p.values().size() == plan->n);
    for (std::size_t l = 0; l < plan->n; l += 37) CHECK(p(l * plan->d_t) == p.values()[l]);
    CHECK_NOTHROW(p(plan->n * plan->d_t));
    CHECK(p(plan->n * plan->d_t) == p.values()[0]);
    CHECK_THROWS_AS(p(-0.1), DomainError);
    CHECK_THROWS_AS(p(plan->n * plan->d_t + 0.1), DomainError);

    const double h = 1e-7;
    for (std::size_t l = 1; l < 50; ++l) {
        const double t = l * plan->d_t;
        const cplx left = (p(t) - p(t - h)) / h;
        const cplx right = (p(t + h) - p(t)) / h;
        CHECK(std::abs(left - right) < 1e-3 * (1.0 + std::abs(left)));
    }
}

TEST_CASE("single-mode processes are analytic") {
    const auto plan = unit_ohmic_plan();
    const auto& amp = *plan->amplitudes;
    std::vector<cplx> y(plan->n_nodes, cplx{0.0, 0.0});
    y[0] = 1.0;
    const auto p0 = process_from_gaussians(plan, y);
    for (double t : {0.0, 0.37, 4.2, 9.9}) CHECK(std::abs(p0(t) - amp[0]) < 1e-12);
    CHECK(amp[0] > 0.0);

    y[0] = 0.0;
    y[1] = 1.0;
    const auto p1 = process_from_gaussians(plan, y);
    const double w1 = plan->d_omega;
    CHECK(amp[1] == doctest::Approx(std::sqrt(w1 * sd_value(OhmicSpectralDensity::make(1, 1, 1), w1) / kPi)));
    for (double t : {0.0, 0.37, 4.2, 9.9}) {
        CHECK(std::abs(p1(t) - amp[1] * std::polar(1.0, -w1 * t)) < 1e-3 * plan->abstol);
    }
}

TEST_CASE("realizations are reproducible and stream-separated") {
    const auto plan = unit_ohmic_plan();
    const auto a = sample_process(plan, 5, 3);
    const auto b = sample_process(plan, 5, 3);
    const auto c = sample_process(plan, 5, 4);
    const auto d = sample_process(plan, 6, 3);
    CHECK(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
    CHECK(a.values()[1] != c.values()[1]);
    CHECK(a.values()[1] != d.values()[1]);
}

TEST_CASE("ensemble statistics reproduce the planned correlation") {
    const auto plan = unit_ohmic_plan();
    const int M = 10000;
    const double sigma = std::sqrt(plan->reconstructed_bcf(0.0).real());
    const double bound = 5.0 * sigma * sigma / std::sqrt(M);
    constexpr int G = 20;
    std::vector<double> t(G);
    for (int i = 0; i < G; ++i) t[i] = 10.0 * i / (G - 1);

    std::vector<cplx> mean(G, 0.0);
    std::vector<cplx> corr(G * G, 0.0), pseudo(G * G, 0.0);
    double m2 = 0.0, m4re = 0.0, m4im = 0.0;
    for (int r = 0; r < M; ++r) {
        const auto p = sample_process(plan, 2024, r);
        std::vector<cplx> z(G);
        for (int i = 0; i < G; ++i) z[i] = p(t[i]);
        for (int i = 0; i < G; ++i) {
            mean[i] += z[i];
            for (int j = 0; j < G; ++j) {
                corr[i * G + j] += z[i] * std::conj(z[j]);
                pseudo[i * G + j] += z[i] * z[j];
            }
        }
        const cplx z5 = z[5];
        m2 += 0.5 * std::norm(z5);
        m4re += std::pow(z5.real(), 4);
        m4im += std::pow(z5.imag(), 4);
    }
    for (int i = 0; i < G; ++i) CHECK(std::abs(mean[i] / double(M)) < 5.0 * sigma / std::sqrt(M));
    double worst_corr = 0.0, worst_pseudo = 0.0;
    for (int i = 0; i < G; ++i) {
        for (int j = 0; j < G; ++j) {
            const cplx expected = plan->reconstructed_bcf(t[i] - t[j] >= 0 ? t[i] - t[j] : t[j] - t[i]);
            const cplx e = t[i] >= t[j] ? expected : std::conj(expected);
            worst_corr = std::max(worst_corr, std::abs(corr[i * G + j] / double(M) - e));
            worst_pseudo = std::max(worst_pseudo, std::abs(pseudo[i * G + j] / double(M)));
        }
    }
    MESSAGE("max corr deviation " << worst_corr << ", max pseudo " << worst_pseudo << ", bound " << bound);
    CHECK(worst_corr < plan->abstol + bound);
    CHECK(worst_pseudo < bound);

    // excess kurtosis of each quadrature component
    const double var = m2 / M;
    const double tol = 3.0 * std::sqrt(24.0 / M);
    CHECK(std::abs(m4re / M / (var * var) - 3.0) < tol);
    CHECK(std::abs(m4im / M / (var * var) - 3.0) < tol);
}

TEST_CASE("thermal spectrum drives a process with the thermal kernel") {
    const auto sd = OhmicSpectralDensity::make(0.5, 2.0, 0.3);
    const double beta = 0.5, t_max = 8.0, abstol = 2e-3;
    const auto plan = std::make_shared<NoisePlan>(plan_noise(thermal_noise_spectrum(sd, beta), t_max, abstol));
    for (double tau : {0.0, 0.5, 2.0, 7.5})
        CHECK(std::abs(plan->reconstructed_bcf(tau) - thermal_kernel(sd, beta, tau)) < abstol);

    const int M = 4000;
    const double bound = 5.0 * thermal_kernel(sd, beta, 0.0).real() / std::sqrt(M);
    const std::vector<double> lags{0.0, 1.0, 3.0};
    std::vector<cplx> acc(lags.size(), 0.0);
    for (int r = 0; r < M; ++r) {
        const auto y = sample_process(plan, 77, r);
        for (std::size_t k = 0; k < lags.size(); ++k) acc[k] += y(2.0 + lags[k]) * std::conj(y(2.0));
    }
    for (std::size_t k = 0; k < lags.size(); ++k)
        CHECK(std::abs(acc[k] / double(M) - thermal_kernel(sd, beta, lags[k])) < abstol + bound);
}

TEST_CASE("binary dump") {
    const auto plan = unit_ohmic_plan();
    const auto p = sample_process(plan, 0xfeedULL);
    std::stringstream ss;
    write_process(ss, p);
    const std::string bytes = ss.str();
    CHECK(bytes.size() == 24 + 16 * plan->n);
    CHECK(static_cast<unsigned char>(bytes[0]) == (plan->n & 0xff));
    CHECK(static_cast<unsigned char>(bytes[16]) == 0xed);
    CHECK(static_cast<unsigned char>(bytes[17]) == 0xfe);

    const auto d = read_process(ss);
    CHECK(d.n == plan->n);
    CHECK(d.d_t == plan->d_t);
    CHECK(d.seed == 0xfeedULL);
    CHECK(std::equal(d.values.begin(), d.values.end(), p.values().begin()));

    std::stringstream cut(bytes.substr(0, 30));
    CHECK_THROWS_AS(read_process(cut), ConfigError);
}
