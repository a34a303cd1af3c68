// spline.cpp - natural cubic spline of complex samples on a uniform grid

#include "hopskit/spline.hpp"

#include <cmath>
#include <string>

namespace hops {

UniformCubicSpline::UniformCubicSpline(std::vector<cplx> values, double dt)
    : z_(std::move(values)), m_(z_.size(), cplx{0.0, 0.0}), dt_(dt) {
    if (z_.size() < 2) throw DomainError("spline needs at least two nodes");
    if (!(dt > 0.0)) throw DomainError("spline needs dt > 0");
    const std::size_t n = z_.size();
    if (n == 2) return;
    // Interior equations M_{i-1} + 4 M_i + M_{i+1} = z_{i+1} - 2 z_i + z_{i-1}
    // in units where M carries dt²/6; natural ends M_0 = M_{n-1} = 0. Thomas sweep.
    std::vector<double> c(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double denom = 4.0 - (i > 1 ? c[i - 1] : 0.0);
        c[i] = 1.0 / denom;
        const cplx rhs = z_[i + 1] - 2.0 * z_[i] + z_[i - 1];
        m_[i] = (rhs - (i > 1 ? m_[i - 1] : cplx{0.0, 0.0})) / denom;
    }
    for (std::size_t i = n - 2; i >= 2; --i) m_[i - 1] -= c[i - 1] * m_[i];
}

cplx UniformCubicSpline::operator()(double t) const {
    if (!(t >= 0.0 && t <= end()))
        throw DomainError("spline evaluated at t=" + std::to_string(t) + " outside [0, " + std::to_string(end()) + "]");
    const double x = t / dt_;
    std::size_t i = static_cast<std::size_t>(x);
    if (i >= z_.size() - 1) i = z_.size() - 2;
    const double b = x - static_cast<double>(i);
    const double a = 1.0 - b;
    return a * z_[i] + b * z_[i + 1] + (a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1];
}

}  // namespace hops
