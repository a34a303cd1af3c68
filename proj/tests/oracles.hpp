// oracles.hpp - independent reference values shared by unit and acceptance tests

#pragma once

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "hopskit/bcf.hpp"
#include "hopskit/types.hpp"

namespace hops::oracle {

// Exact pure-dephasing coherence |ρ01(t)| / |ρ01(0)| for L = σ_z:
// exp(-(4/π)∫ J(x) coth(βx/2) (1 - cos xt)/x² dx), panel by panel.
inline double dephasing(const OhmicSpectralDensity& sd, double beta, double t) {
    if (t == 0.0) return 1.0;
    auto f = [&](double x) {
        if (x < 1e-200) return 0.0;
        const double c = std::isinf(beta) ? 1.0 : 1.0 / std::tanh(0.5 * beta * x);
        const double q = std::sin(0.5 * x * t) / x;
        return sd(x) * c * 2.0 * q * q;
    };
    const double width = std::min(kPi / t, 0.25 * sd.omega_c);
    boost::math::quadrature::tanh_sinh<double> ts;
    double sum = ts.integrate(f, 0.0, width, 1e-12);
    for (double a = width; a < sd.omega_max(); a += width)
        sum += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, a + width, 8, 1e-12);
    return std::exp(-4.0 / kPi * sum);
}

}  // namespace hops::oracle
