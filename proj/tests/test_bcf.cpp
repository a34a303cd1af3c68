// Unit tests for spectral densities and exact bath correlation functions.

#include "doctest.h"

#include <cmath>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "hopskit/bcf.hpp"

using namespace hops;

namespace {

// Independent oracle: composite Gauss-Legendre in u = sqrt(ω) on unit-width
// panels of ω, no adaptivity. `nodes_per_panel` selects the rule size.
template <int Order>
cplx gl_fourier(const std::function<double(double)>& f, double tau, double wmax, double panel) {
    using GL = boost::math::quadrature::gauss<double, Order>;
    double re = 0.0, im = 0.0;
    for (double a = 0.0; a < wmax; a += panel) {
        const double ua = std::sqrt(a), ub = std::sqrt(std::min(a + panel, wmax));
        auto gc = [&](double u) { const double w = u * u; return f(w) * std::cos(w * tau) * 2.0 * u; };
        auto gs = [&](double u) { const double w = u * u; return f(w) * std::sin(w * tau) * 2.0 * u; };
        re += GL::integrate(gc, ua, ub);
        im -= GL::integrate(gs, ua, ub);
    }
    return {re, im};
}

double rel_err(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("sd_value matches direct evaluation") {
    const auto sd = OhmicSpectralDensity::make(1.0, 1.0, 1.0);
    CHECK(sd_value(sd, 1.0) == doctest::Approx(0.5 * kPi * std::exp(-1.0)).epsilon(1e-14));
    CHECK(sd_value(sd, 1.0) == doctest::Approx(0.57786).epsilon(1e-5));
    CHECK(sd_value(sd, 0.0) == 0.0);

    const auto sub = OhmicSpectralDensity::make(0.5, 10.0, 1.0);
    CHECK(sd_value(sub, 10.0) == doctest::Approx(5.0 * kPi / std::exp(1.0)).epsilon(1e-14));
    CHECK(sd_value(sub, 10.0) == doctest::Approx(5.7786).epsilon(1e-4));

    CHECK_THROWS_AS(sd_value(sd, -1.0), DomainError);
    CHECK_THROWS_AS(OhmicSpectralDensity::make(0.0, 1.0, 1.0), DomainError);
    CHECK_THROWS_AS(OhmicSpectralDensity::make(1.0, -1.0, 1.0), DomainError);
    CHECK_THROWS_AS(OhmicSpectralDensity::make(1.0, 1.0, -0.1), DomainError);
}

TEST_CASE("spectra are nonnegative on (0, 20 omega_c)") {
    for (double s : {0.5, 1.0, 2.0}) {
        const auto sd = OhmicSpectralDensity::make(s, 3.0, 0.2);
        for (double w = 1e-3; w < 60.0; w *= 1.3) {
            CHECK(sd_value(sd, w) >= 0.0);
            CHECK(thermal_spectrum(sd, 0.7, w).value() >= 0.0);
        }
    }
}

TEST_CASE("bcf_zero_temp closed form") {
    const auto sd = OhmicSpectralDensity::make(1.0, 100.0, 0.01);
    CHECK(std::abs(bcf_zero_temp(sd, 0.0) - cplx(50.0, 0.0)) < 1e-12);

    const auto unit = OhmicSpectralDensity::make(1.0, 1.0, 1.0);
    CHECK(std::abs(bcf_zero_temp(unit, 1.0) - cplx(0.0, -0.25)) < 1e-15);

    // hermiticity
    const auto sub = OhmicSpectralDensity::make(0.5, 10.0, 1.0);
    for (double t : {0.01, 0.3, 2.0, 17.0}) {
        CHECK(std::abs(bcf_zero_temp(sub, -t) - std::conj(bcf_zero_temp(sub, t))) < 1e-13);
    }
    // algebraic decay ~ τ^{-(s+1)}
    const double r = std::abs(bcf_zero_temp(sub, 200.0)) / std::abs(bcf_zero_temp(sub, 100.0));
    CHECK(r == doctest::Approx(std::pow(2.0, -1.5)).epsilon(1e-3));
}

TEST_CASE("bcf_zero_temp agrees with Fourier quadrature of J") {
    const auto sd = OhmicSpectralDensity::make(0.5, 10.0, 1.0);
    const double tau = 0.3;
    const cplx oracle = gl_fourier<30>([&](double w) { return sd(w); }, tau, 500.0, 1.0) / kPi;
    CHECK(rel_err(bcf_zero_temp(sd, tau), oracle) < 1e-8);
}

TEST_CASE("bcf_full_temp limits and symmetry") {
    const auto sd = OhmicSpectralDensity::make(1.0, 5.0, 0.3);
    SUBCASE("zero temperature limit") {
        for (double t : {0.0, 0.2, 1.5}) {
            // thermal correction ~ α π²/(6β²) is τ-independent, so scale by α(0)
            const double err = std::abs(bcf_full_temp(sd, 1e4, t) - bcf_zero_temp(sd, t));
            CHECK(err < 1e-8 * std::abs(bcf_zero_temp(sd, 0.0)));
        }
    }
    SUBCASE("imaginary part does not depend on beta") {
        for (double t : {0.1, 0.7, 3.0}) {
            const double a = bcf_full_temp(sd, 0.3, t).imag();
            const double b = bcf_full_temp(sd, 5.0, t).imag();
            CHECK(a == doctest::Approx(b).epsilon(1e-9));
            CHECK(a == doctest::Approx(bcf_zero_temp(sd, t).imag()).epsilon(1e-9));
        }
    }
    SUBCASE("hermiticity") {
        for (double t : {0.1, 2.0}) {
            CHECK(std::abs(bcf_full_temp(sd, 1.0, -t) - std::conj(bcf_full_temp(sd, 1.0, t))) < 1e-10);
            CHECK(std::abs(thermal_kernel(sd, 1.0, -t) - std::conj(thermal_kernel(sd, 1.0, t))) < 1e-10);
        }
    }
    CHECK_THROWS_AS(bcf_full_temp(sd, 0.0, 1.0), DomainError);
    CHECK_THROWS_AS(bcf_full_temp(sd, -1.0, 1.0), DomainError);
}

TEST_CASE("bcf_full_temp against refined quadrature (sub-Ohmic, beta = 1)") {
    const auto sd = OhmicSpectralDensity::make(0.5, 10.0, 1.0);
    const double beta = 1.0, tau = 0.2;
    // integrand J coth ~ ω^{-1/2} near 0 becomes smooth in u = sqrt(ω)
    auto f_re = [&](double w) { return sd(w) / std::tanh(0.5 * beta * w); };
    auto f_im = [&](double w) { return sd(w); };
    auto assemble = [&](auto rule) {
        const cplx re_part = rule(f_re);
        const cplx im_part = rule(f_im);
        return cplx(re_part.real(), im_part.imag()) / kPi;
    };
    const cplx coarse = assemble([&](auto f) { return gl_fourier<20>(f, tau, 500.0, 1.0); });
    const cplx fine = assemble([&](auto f) { return gl_fourier<40>(f, tau, 500.0, 1.0); });
    REQUIRE(rel_err(coarse, fine) < 1e-8);  // oracle itself converged
    CHECK(rel_err(bcf_full_temp(sd, beta, tau), fine) < 1e-6);
}

TEST_CASE("thermal split: full = zero-T + 2 Re thermal kernel") {
    const auto sd = OhmicSpectralDensity::make(0.5, 10.0, 0.15);
    const double beta = 1.0;
    for (double t : {0.0, 0.05, 0.5, 3.0, 9.0, 15.0}) {
        const cplx full = bcf_full_temp(sd, beta, t);
        const cplx split = bcf_zero_temp(sd, t) + 2.0 * thermal_kernel(sd, beta, t).real();
        CHECK(std::abs(full - split) < 1e-8 * std::abs(bcf_zero_temp(sd, 0.0)));
    }
}

TEST_CASE("thermal_spectrum") {
    const auto ohm = OhmicSpectralDensity::make(1.0, 4.0, 0.3);
    CHECK(thermal_spectrum(ohm, 1.0, 0.0).value() == doctest::Approx(0.5 * kPi * 0.3));
    CHECK(thermal_spectrum(ohm, 2.0, 0.0).value() == doctest::Approx(0.25 * kPi * 0.3));
    // continuity of the ω → 0 limit
    CHECK(thermal_spectrum(ohm, 2.0, 1e-7).value() == doctest::Approx(0.25 * kPi * 0.3).epsilon(1e-6));
    CHECK(thermal_spectrum(ohm, 1e3, 1.0).value() < 1e-300);
    CHECK(thermal_spectrum(ohm, kInfiniteBeta, 1.0).value() == 0.0);

    const auto sub = OhmicSpectralDensity::make(0.5, 10.0, 0.15);
    CHECK(thermal_spectrum(sub, 1.0, 1.0).value() ==
          doctest::Approx(sd_value(sub, 1.0) / (std::exp(1.0) - 1.0)).epsilon(1e-14));
    CHECK(thermal_spectrum(sub, 1.0, 0.0).is_divergent());
    CHECK(thermal_spectrum(OhmicSpectralDensity::make(2.0, 1.0, 1.0), 1.0, 0.0).value() == 0.0);
    CHECK_THROWS_AS(thermal_spectrum(sub, 1.0, -1.0), DomainError);
}

TEST_CASE("pseudo_sd at the origin and detailed balance") {
    const double beta = 0.8;
    const auto ohm = OhmicSpectralDensity::make(1.0, 5.0, 0.2);
    CHECK(pseudo_sd(ohm, beta, 0.0).value() == doctest::Approx(kPi * 0.2 / 2.0 / beta));
    CHECK(pseudo_sd(OhmicSpectralDensity::make(2.0, 5.0, 0.2), beta, 0.0).value() == 0.0);
    const auto div = pseudo_sd(OhmicSpectralDensity::make(0.5, 5.0, 0.2), beta, 0.0);
    CHECK(div.is_divergent());
    CHECK_THROWS_AS(div.value(), DomainError);
    CHECK(std::isinf(div.value_or(std::numeric_limits<double>::infinity())));

    for (double s : {0.5, 1.0, 2.5}) {
        const auto sd = OhmicSpectralDensity::make(s, 3.0, 0.4);
        for (double w = 1e-3; w < 50.0; w *= 1.7) {
            const double lhs = pseudo_sd(sd, beta, w).value() - pseudo_sd(sd, beta, -w).value();
            CHECK(std::abs(lhs - sd(w)) <= 1e-12 * std::max(1.0, sd(w)));
        }
    }
    // zero temperature: no absorption
    CHECK(pseudo_sd(ohm, kInfiniteBeta, -1.0).value() == 0.0);
    CHECK(pseudo_sd(ohm, kInfiniteBeta, 1.0).value() == doctest::Approx(ohm(1.0)));
}
