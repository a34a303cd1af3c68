// spline.hpp - natural cubic spline of complex samples on a uniform grid

#pragma once

#include <span>
#include <vector>

#include "hopskit/types.hpp"

namespace hops {

// Second-derivative form, so evaluation at a node returns the stored sample
// bit for bit (the cubic correction terms vanish identically there).
class UniformCubicSpline {
public:
    UniformCubicSpline() = default;
    // Nodes at t_i = i·dt, i = 0..values.size()-1; needs at least two nodes.
    UniformCubicSpline(std::vector<cplx> values, double dt);

    // Throws DomainError outside [0, (size()-1)·dt].
    cplx operator()(double t) const;

    std::span<const cplx> nodes() const noexcept { return z_; }
    std::size_t size() const noexcept { return z_.size(); }
    double step() const noexcept { return dt_; }
    double end() const noexcept { return dt_ * static_cast<double>(z_.size() - 1); }

private:
    std::vector<cplx> z_;
    std::vector<cplx> m_;  // second derivatives times dt²/6
    double dt_{0.0};
};

}  // namespace hops
