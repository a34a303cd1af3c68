// master_eq.cpp - Born-Markov master equations for the spin-boson model

#include "hopskit/master_eq.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include <boost/numeric/odeint.hpp>

#include "hopskit/parallel.hpp"
#include "hopskit/quadrature.hpp"
#include "hopskit/spline.hpp"

namespace hops {

double SpinBosonParams::lambda() const noexcept { return std::hypot(epsilon, delta); }

CMatrix pauli_x() {
    CMatrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

CMatrix pauli_y() {
    CMatrix m(2, 2);
    m << 0, cplx(0, -1), cplx(0, 1), 0;
    return m;
}

CMatrix pauli_z() {
    CMatrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

CMatrix sigma_plus() {
    CMatrix m = CMatrix::Zero(2, 2);
    m(0, 1) = 1.0;
    return m;
}

CMatrix sigma_minus() { return sigma_plus().transpose(); }

JumpDecomposition decompose_l(const SpinBosonParams& p) {
    const double lambda = p.lambda();
    if (!(lambda > 0.0)) throw DomainError("decompose_l: epsilon and delta must not both vanish");
    JumpDecomposition d;
    d.theta = 0.5 * std::atan2(p.delta, p.epsilon);
    d.lambda = lambda;
    // exact zeros for ε = 0 and Δ = 0 instead of cos(π/2) ≈ 6e-17
    const double c2 = p.epsilon == 0.0 ? 0.0 : p.epsilon / lambda;
    const double s2 = p.delta == 0.0 ? 0.0 : p.delta / lambda;
    const double sin_sq = 0.5 * (1.0 - c2);
    const double cos_sq = 0.5 * (1.0 + c2);
    d.l_0 = c2 * (c2 * pauli_z() + s2 * pauli_x());
    d.l_plus = s2 * (0.5 * s2 * pauli_z() + sin_sq * sigma_plus() - cos_sq * sigma_minus());
    d.l_minus = d.l_plus.adjoint();
    return d;
}

namespace {

// e^z - 1 without cancellation for small |z|.
cplx expm1(cplx z) {
    const double x = z.real(), y = z.imag();
    const double s = std::sin(0.5 * y);
    return {std::expm1(x) * std::cos(y) - 2.0 * s * s, std::exp(x) * std::sin(y)};
}

}  // namespace

cplx gamma(const ExponentialBCF& e, double t, double omega) {
    if (!(t >= 0.0)) throw DomainError("gamma: t must be >= 0");
    cplx sum = 0.0;
    for (const auto& term : e.terms) {
        const cplx a = term.W - cplx(0.0, omega);
        if (std::isinf(t)) {
            sum += term.G / a;
        } else if (std::abs(a) < 1e-14) {
            sum += term.G * t * (1.0 - 0.5 * a * t);
        } else {
            sum += term.G * -expm1(-a * t) / a;
        }
    }
    return sum;
}

namespace {

// J̃ on x > 0 and its mirror J̃(-x) = J(x) n̄(βx).
double pseudo_positive(const OhmicSpectralDensity& sd, double beta, double x) {
    return std::isinf(beta) ? sd(x) : sd(x) / -std::expm1(-beta * x);
}

double pseudo_negative(const OhmicSpectralDensity& sd, double beta, double x) {
    return std::isinf(beta) ? 0.0 : sd(x) * bose(beta * x);
}

}  // namespace

double lamb_shift(const OhmicSpectralDensity& sd, double beta, double omega) {
    if (!(beta > 0.0)) throw DomainError("lamb_shift: beta must be > 0");
    if (sd.alpha == 0.0) return 0.0;
    // (1/π)∫ J(x)/x dx in closed form
    if (omega == 0.0) return -0.5 * sd.alpha * sd.omega_c * std::tgamma(sd.s);
    const double wmax = sd.omega_max();
    auto jp = [&](double x) { return pseudo_positive(sd, beta, x); };
    auto jn = [&](double x) { return pseudo_negative(sd, beta, x); };
    const bool thermal = !std::isinf(beta);
    double sum = 0.0;
    if (omega > 0.0) {
        sum += quad::principal_value(jp, omega, wmax);
        if (thermal) sum += quad::integrate_from_zero([&](double x) { return jn(x) / (omega + x); }, wmax, sd.s);
    } else {
        const double c = -omega;
        sum -= quad::integrate_from_zero([&](double x) { return jp(x) / (c + x); }, wmax, sd.s);
        if (thermal) sum -= quad::principal_value(jn, c, wmax);
    }
    return sum / kPi;
}

double gamma_zero_frequency(const OhmicSpectralDensity& sd, double beta, double t) {
    if (!(beta > 0.0)) throw DomainError("gamma_zero_frequency: beta must be > 0");
    if (!(t >= 0.0)) throw DomainError("gamma_zero_frequency: t must be >= 0");
    if (sd.alpha == 0.0 || t == 0.0) return 0.0;
    auto f = [&](double x) {
        const double c = std::isinf(beta) ? 1.0 : 1.0 / std::tanh(0.5 * beta * x);
        return sd(x) * c / x;
    };
    const double scale = std::isinf(beta) ? sd.omega_c : std::min(sd.omega_c, 1.0 / beta);
    const quad::Panels panels{sd.omega_max(), 0.05 * scale, sd.omega_c, sd.s};
    return quad::oscillatory(f, t, panels, quad::Oscillation::sine) / kPi;
}

const char* to_string(MeVariant v) noexcept { return v == MeVariant::constant ? "constant" : "extended"; }

namespace {

// Spline table of the real thermal part 2 Re K(τ) of the kernel on [0, t_end],
// refined by doubling until midpoints agree to 1e-6 of the peak. The grid
// extends kPad nodes past both ends (the kernel is even in τ), so the natural
// end conditions do not spoil the accuracy inside [0, t_end].
class ThermalTable {
public:
    ThermalTable(const OhmicSpectralDensity& sd, double beta, double t_end) {
        auto f = [&](double tau) { return 2.0 * thermal_kernel_real(sd, beta, std::abs(tau)); };
        std::size_t n = 64;
        double h = t_end / static_cast<double>(n);
        auto fill = [&](std::vector<cplx>& v, double first, std::size_t count, double step) {
            v.resize(count);
            parallel_for(count, [&](std::size_t i) { v[i] = f(first + step * static_cast<double>(i)); });
        };
        const double pad = static_cast<double>(kPad);
        std::vector<cplx> nodes;
        fill(nodes, -pad * h, n + 2 * kPad + 1, h);
        const double tol = 1e-6 * std::abs(nodes[kPad]) + 1e-300;
        for (int round = 0; round < 14; ++round) {
            const UniformCubicSpline spline(nodes, h);
            std::vector<cplx> mid;
            fill(mid, (0.5 - pad) * h, nodes.size() - 1, h);
            double err = 0.0;
            for (std::size_t i = kPad; i < kPad + n; ++i)
                err = std::max(err, std::abs(spline(h * (static_cast<double>(i) + 0.5)) - mid[i]));
            if (err < tol) {
                spline_ = spline;
                offset_ = pad * h;
                return;
            }
            std::vector<cplx> merged(2 * nodes.size() - 1);
            for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
                merged[2 * i] = nodes[i];
                merged[2 * i + 1] = mid[i];
            }
            merged.back() = nodes.back();
            n *= 2;
            h *= 0.5;
            // keep the padding kPad nodes wide at the new spacing
            nodes.assign(merged.begin() + kPad, merged.end() - kPad);
        }
        throw DomainError("propagate_me: thermal kernel table did not converge");
    }

    double operator()(double t) const { return spline_(t + offset_).real(); }

private:
    static constexpr std::size_t kPad = 8;
    UniformCubicSpline spline_;
    double offset_{0.0};
};

void validate_rho(const CMatrix& rho) {
    if (rho.rows() != 2 || rho.cols() != 2) throw DomainError("propagate_me: rho0 must be 2x2");
    if ((rho - rho.adjoint()).norm() > 1e-12) throw DomainError("propagate_me: rho0 must be Hermitian");
    if (std::abs(rho.trace() - 1.0) > 1e-12) throw DomainError("propagate_me: rho0 must have unit trace");
    const Eigen::SelfAdjointEigenSolver<CMatrix> es(rho);
    if (es.eigenvalues().minCoeff() < -1e-12) throw DomainError("propagate_me: rho0 must be positive semidefinite");
}

}  // namespace

MeResult propagate_me(const SpinBosonParams& p, const CMatrix& rho0, const std::vector<double>& t_grid,
                      const MeOptions& options) {
    namespace odeint = boost::numeric::odeint;
    using State = std::vector<cplx>;

    validate_rho(rho0);
    if (t_grid.empty() || t_grid.front() != 0.0) throw DomainError("propagate_me: t_grid must start at 0");
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        if (!(t_grid[i] > t_grid[i - 1])) throw DomainError("propagate_me: t_grid must be strictly increasing");

    const auto dec = decompose_l(p);
    const CMatrix h_sys = p.epsilon * pauli_z() + p.delta * pauli_x();
    const std::array<double, 3> omegas{-2.0 * dec.lambda, 0.0, 2.0 * dec.lambda};
    const std::array<CMatrix, 3> ops{dec.l_minus, dec.l_0, dec.l_plus};
    std::array<CMatrix, 3> ldl;
    for (int k = 0; k < 3; ++k) ldl[k] = ops[k].adjoint() * ops[k];
    const bool has_l0 = dec.l_0.norm() > 0.0;

    // which channels take Γ(t, ω) and which the stationary values
    const bool extended = options.variant == MeVariant::extended;
    std::array<bool, 3> active{true, has_l0 && !options.skip_omega0, true};
    std::array<bool, 3> dynamic{extended && !options.freeze_side_channels, extended, extended && !options.freeze_side_channels};
    std::array<double, 3> rate{}, shift{};
    for (int k = 0; k < 3; ++k) {
        if (!active[k] || dynamic[k]) continue;
        const auto j = pseudo_sd(p.sd, p.beta, omegas[k]);
        if (j.is_divergent())
            throw DomainError("propagate_me: pseudo-SD divergent at omega=0; use extended or skip the omega=0 channel");
        rate[k] = j.value();
        shift[k] = lamb_shift(p.sd, p.beta, omegas[k]);
    }

    std::optional<ThermalTable> thermal;
    if (extended && !std::isinf(p.beta) && p.sd.alpha > 0.0) thermal.emplace(p.sd, p.beta, t_grid.back());
    auto kernel = [&](double t) {
        cplx a = bcf_zero_temp(p.sd, t);
        if (thermal) a += (*thermal)(t);
        return a;
    };

    // state: ρ column-major, then Γ(t, ω) per channel
    State y(7, 0.0);
    for (int c = 0; c < 2; ++c)
        for (int r = 0; r < 2; ++r) y[2 * c + r] = rho0(r, c);

    auto channel = [&](const State& x, int k, double& r, double& s) {
        if (dynamic[k]) {
            r = x[4 + k].real();
            s = x[4 + k].imag();
        } else {
            r = rate[k];
            s = shift[k];
        }
    };

    auto system = [&](const State& x, State& dxdt, double t) {
        const Eigen::Map<const Eigen::Matrix2cd> rho(x.data());
        Eigen::Matrix2cd h = h_sys;
        Eigen::Matrix2cd diss = Eigen::Matrix2cd::Zero();
        for (int k = 0; k < 3; ++k) {
            if (!active[k]) continue;
            double r, s;
            channel(x, k, r, s);
            h += s * ldl[k];
            diss += r * (2.0 * ops[k] * rho * ops[k].adjoint() - ldl[k] * rho - rho * ldl[k]);
        }
        const Eigen::Matrix2cd d = cplx(0.0, -1.0) * (h * rho - rho * h) + diss;
        for (int i = 0; i < 4; ++i) dxdt[i] = d.data()[i];
        const cplx a = extended ? kernel(t) : cplx(0.0);
        for (int k = 0; k < 3; ++k)
            dxdt[4 + k] = dynamic[k] ? a * std::exp(cplx(0.0, omegas[k] * t)) : cplx(0.0);
    };

    MeResult result;
    auto observe = [&](const State& x, double) {
        CMatrix rho(2, 2);
        for (int c = 0; c < 2; ++c)
            for (int r = 0; r < 2; ++r) rho(r, c) = x[2 * c + r];
        if (!rho.allFinite()) throw DomainError("propagate_me: non-finite density matrix");
        result.rho.push_back(rho);
        std::array<cplx, 3> channels{};
        for (int k = 0; k < 3; ++k) {
            if (!active[k]) continue;
            double r, s;
            channel(x, k, r, s);
            channels[k] = {r, s};
        }
        result.channels.push_back(channels);
    };
    result.times = t_grid;
    const double dt0 = t_grid.size() > 1 ? 1e-3 * (t_grid[1] - t_grid[0]) : 1e-3;
    auto stepper = odeint::make_controlled(options.atol, options.rtol, odeint::runge_kutta_dopri5<State>());
    odeint::integrate_times(stepper, system, y, t_grid.begin(), t_grid.end(), dt0, observe,
                            odeint::max_step_checker(1'000'000));
    return result;
}

std::vector<double> sigma_z_series(const MeResult& r) {
    std::vector<double> out;
    out.reserve(r.rho.size());
    for (const auto& rho : r.rho) out.push_back((rho(0, 0) - rho(1, 1)).real());
    return out;
}

}  // namespace hops
