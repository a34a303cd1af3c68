// expfit.cpp - sum-of-exponentials approximation of correlation kernels

#include "hopskit/expfit.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include <unsupported/Eigen/LevenbergMarquardt>

#include "hopskit/parallel.hpp"
#include "hopskit/random.hpp"

namespace hops {

ExponentialBCF ExponentialBCF::make(std::vector<ExpTerm> terms) {
    if (terms.empty()) throw DomainError("exponential BCF needs at least one term");
    for (const auto& t : terms) {
        if (!(t.W.real() > 0.0)) throw DomainError("exponential BCF rates need Re W > 0");
    }
    return ExponentialBCF{std::move(terms)};
}

SampledKernel SampledKernel::sample(const std::function<cplx(double)>& kernel, double tau0,
                                    std::size_t points) {
    if (!(tau0 > 0.0)) throw DomainError("sampled kernel needs tau0 > 0");
    if (points < 2) throw DomainError("sampled kernel needs at least two points");
    SampledKernel k{tau0, std::vector<cplx>(points)};
    for (std::size_t i = 0; i < points; ++i) k.values[i] = kernel(k.tau(i));
    return k;
}

double SampledKernel::tau(std::size_t i) const noexcept {
    return tau0 * static_cast<double>(i) / static_cast<double>(values.size() - 1);
}

cplx eval_expsum(const ExponentialBCF& e, double tau) {
    cplx sum{0.0, 0.0};
    for (const auto& t : e.terms) sum += t.G * std::exp(-t.W * tau);
    return sum;
}

double reconstruct_sd(const ExponentialBCF& e, double omega) {
    cplx sum{0.0, 0.0};
    for (const auto& t : e.terms) sum += t.G / (t.W - cplx(0.0, omega));
    return sum.real();
}

namespace {

// (Σ|x_i|^p)^{1/p}, scaled by the largest entry to stay finite for large p.
double p_norm(const std::vector<double>& mags, double p) {
    const double peak = *std::max_element(mags.begin(), mags.end());
    if (peak == 0.0) return 0.0;
    double sum = 0.0;
    for (double m : mags) sum += std::pow(m / peak, p);
    return peak * std::pow(sum, 1.0 / p);
}

FitErrors errors_on_grid(const std::vector<cplx>& model, const std::vector<cplx>& target, double p) {
    std::vector<double> r(target.size()), a(target.size());
    for (std::size_t i = 0; i < target.size(); ++i) {
        r[i] = std::abs(model[i] - target[i]);
        a[i] = std::abs(target[i]);
    }
    const double amax = *std::max_element(a.begin(), a.end());
    const double rmax = *std::max_element(r.begin(), r.end());
    if (amax == 0.0) throw DomainError("fit target is identically zero");
    return {p_norm(r, p) / p_norm(a, p), rmax / amax};
}

// Parameter layout per term j: [Re G, Im G, u, v] with W = e^u + i v, in units
// where τ₀ = 1 and max|α| = 1. Rates are held to what the grid resolves (Re W
// up to 1/h, |Im W| up to π/h for the grid step h) and to an optional physical
// cap. Faster terms only fit the τ = 0 sample and make the hierarchy stiff.
constexpr int kParamsPerTerm = 4;
constexpr double kMinLogRate = -700.0;

struct RateBounds {
    double log_re_max;
    double im_max;
};

RateBounds rate_bounds(double h, double max_rate) {
    RateBounds b{std::log(1.0 / h), kPi / h};
    if (max_rate > 0.0) {
        b.log_re_max = std::min(b.log_re_max, std::log(max_rate));
        b.im_max = std::min(b.im_max, max_rate);
    }
    return b;
}

cplx rate(double u, double v, const RateBounds& b) {
    return {std::exp(std::clamp(u, kMinLogRate, b.log_re_max)), std::clamp(v, -b.im_max, b.im_max)};
}

// Model on the uniform grid t; exp(-W t_i) by repeated multiplication.
std::vector<cplx> model_values(const Eigen::VectorXd& x, const std::vector<double>& t, const RateBounds& b) {
    const int n_terms = static_cast<int>(x.size()) / kParamsPerTerm;
    std::vector<cplx> out(t.size(), cplx{0.0, 0.0});
    for (int j = 0; j < n_terms; ++j) {
        const double* q = x.data() + kParamsPerTerm * j;
        const cplx step = std::exp(-rate(q[2], q[3], b) * t[1]);
        cplx term(q[0], q[1]);
        for (std::size_t i = 0; i < t.size(); ++i, term *= step) out[i] += term;
    }
    return out;
}

struct WeightedResidual : Eigen::DenseFunctor<double> {
    const std::vector<double>& t;
    const std::vector<cplx>& target;
    const std::vector<double>& sqrt_w;
    RateBounds bounds;

    WeightedResidual(int n_terms, const std::vector<double>& t_, const std::vector<cplx>& target_,
                     const std::vector<double>& sqrt_w_, const RateBounds& bounds_)
        : DenseFunctor<double>(kParamsPerTerm * n_terms, 2 * static_cast<int>(t_.size())),
          t(t_), target(target_), sqrt_w(sqrt_w_), bounds(bounds_) {}

    int operator()(const InputType& x, ValueType& f) const {
        const auto model = model_values(x, t, bounds);
        for (std::size_t i = 0; i < t.size(); ++i) {
            const cplx r = sqrt_w[i] * (model[i] - target[i]);
            f[2 * i] = r.real();
            f[2 * i + 1] = r.imag();
        }
        return 0;
    }

    int df(const InputType& x, JacobianType& jac) const {
        const int n_terms = inputs() / kParamsPerTerm;
        for (int j = 0; j < n_terms; ++j) {
            const double* q = x.data() + kParamsPerTerm * j;
            const cplx G(q[0], q[1]);
            const cplx W = rate(q[2], q[3], bounds);
            const int c = kParamsPerTerm * j;
            // clamped coordinates do not move the model
            const double du = q[2] < bounds.log_re_max ? 1.0 : 0.0;
            const double dv = std::abs(q[3]) < bounds.im_max ? 1.0 : 0.0;
            const cplx step = std::exp(-W * t[1]);
            cplx decay{1.0, 0.0};
            for (std::size_t i = 0; i < t.size(); ++i, decay *= step) {
                const cplx e = sqrt_w[i] * decay;
                const cplx dW = -t[i] * G * e;  // ∂/∂W
                const cplx cols[kParamsPerTerm] = {e, cplx(0.0, 1.0) * e, du * dW * W.real(),
                                                   dv * cplx(0.0, 1.0) * dW};
                for (int k = 0; k < kParamsPerTerm; ++k) {
                    jac(2 * i, c + k) = cols[k].real();
                    jac(2 * i + 1, c + k) = cols[k].imag();
                }
            }
        }
        return 0;
    }
};

bool lm_converged(Eigen::LevenbergMarquardtSpace::Status s) {
    using namespace Eigen::LevenbergMarquardtSpace;
    return s == RelativeReductionTooSmall || s == RelativeErrorTooSmall ||
           s == RelativeErrorAndReductionTooSmall || s == CosinusTooSmall || s == FtolTooSmall ||
           s == XtolTooSmall || s == GtolTooSmall;
}

struct Attempt {
    Eigen::VectorXd x;
    FitErrors errors{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    bool converged{false};
};

// One restart: IRLS continuation from p = 2 up to the target p, keeping the
// iterate with the smallest true p-norm objective.
Attempt run_restart(Eigen::VectorXd x, const std::vector<double>& t, const std::vector<cplx>& target,
                    double p, int irls_iterations, const RateBounds& bounds) {
    const std::size_t n = t.size();
    std::vector<double> sqrt_w(n, 1.0);
    const int n_terms = static_cast<int>(x.size()) / kParamsPerTerm;
    WeightedResidual functor(n_terms, t, target, sqrt_w, bounds);

    Attempt best;
    const int ramp = p > 2.0 ? std::max(1, irls_iterations / 3) : 1;
    const int iterations = p == 2.0 ? 1 : irls_iterations;
    double previous = std::numeric_limits<double>::infinity();
    for (int k = 0; k < iterations; ++k) {
        const double pk = 2.0 + (p - 2.0) * std::min(1.0, static_cast<double>(k) / ramp);
        if (k > 0) {
            // w_i = (|r_i| / max|r|)^{p_k - 2}, floored so zero residuals keep a
            // small weight and the normal equations stay well posed
            const auto model = model_values(x, t, bounds);
            std::vector<double> r(n);
            for (std::size_t i = 0; i < n; ++i) r[i] = std::abs(model[i] - target[i]);
            const double rmax = *std::max_element(r.begin(), r.end());
            if (rmax == 0.0) break;
            for (std::size_t i = 0; i < n; ++i) {
                const double rel = std::max(r[i] / rmax, 1e-6);
                sqrt_w[i] = std::pow(rel, 0.5 * (pk - 2.0));
            }
        }
        Eigen::LevenbergMarquardt<WeightedResidual> lm(functor);
        lm.setFtol(1e-12);
        lm.setXtol(1e-12);
        lm.setGtol(0.0);
        lm.setMaxfev(k == 0 ? 200 : 100);
        const auto status = lm.minimize(x);
        if (!x.allFinite()) break;

        const FitErrors err = errors_on_grid(model_values(x, t, bounds), target, p);
        const bool at_target_p = pk == p;
        if (err.rel_p_error < best.errors.rel_p_error) {
            best.x = x;
            best.errors = err;
        }
        if (at_target_p && lm_converged(status)) best.converged = true;
        if (at_target_p && std::abs(previous - err.rel_p_error) <= 1e-6 * err.rel_p_error) break;
        if (at_target_p) previous = err.rel_p_error;
    }
    return best;
}

bool better(const Attempt& a, const Attempt& b) {
    if (a.errors.rel_p_error != b.errors.rel_p_error) return a.errors.rel_p_error < b.errors.rel_p_error;
    return a.errors.max_rel_error < b.errors.max_rel_error;
}

}  // namespace

FitErrors fit_error(const ExponentialBCF& e, const SampledKernel& target, double p) {
    if (target.size() == 0) throw DomainError("fit_error: empty grid");
    if (!(p >= 1.0)) throw DomainError("fit_error: p must be >= 1");
    std::vector<cplx> model(target.size());
    for (std::size_t i = 0; i < target.size(); ++i) model[i] = eval_expsum(e, target.tau(i));
    return errors_on_grid(model, target.values, p);
}

FitResult fit_bcf(const SampledKernel& target, int n_terms, double p, const FitOptions& options) {
    if (n_terms < 1) throw DomainError("fit_bcf: need at least one term");
    if (!(p >= 1.0)) throw DomainError("fit_bcf: p must be >= 1");
    if (options.restarts < 1) throw DomainError("fit_bcf: need at least one restart");
    const std::size_t n = target.size();
    if (n < static_cast<std::size_t>(20 * n_terms))
        throw DomainError("fit_bcf: grid needs at least 20 points per term");

    double amax = 0.0;
    for (const auto& v : target.values) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw DomainError("fit_bcf: target has non-finite samples");
        amax = std::max(amax, std::abs(v));
    }
    if (amax == 0.0) throw DomainError("fit_bcf: target is identically zero");

    const double tau0 = target.tau0;
    std::vector<double> t(n);
    std::vector<cplx> scaled(n);
    for (std::size_t i = 0; i < n; ++i) {
        t[i] = target.tau(i) / tau0;
        scaled[i] = target.values[i] / amax;
    }

    const double omega = options.omega_scale > 0.0 ? options.omega_scale
                                                   : kPi * static_cast<double>(n - 1) / (10.0 * tau0);
    // normalized bounds for the initial rates
    const double log_lo = std::log(1.0);
    const RateBounds bounds = rate_bounds(t[1], options.max_rate * tau0);
    const double log_hi = std::min(std::log(std::max(10.0 * omega * tau0, 1.0 + 1e-9)), bounds.log_re_max);
    const double im_hi = std::min(10.0 * omega * tau0, bounds.im_max);
    const double g_scale = std::abs(scaled[0]) / n_terms;

    std::vector<Attempt> attempts(static_cast<std::size_t>(options.restarts));
    parallel_for(attempts.size(), [&](std::size_t r) {
        auto rng = make_engine(options.seed, r);
        std::normal_distribution<double> normal(0.0, 1.0);
        std::uniform_real_distribution<double> uniform(0.0, 1.0);
        Eigen::VectorXd x(kParamsPerTerm * n_terms);
        for (int j = 0; j < n_terms; ++j) {
            double* q = x.data() + kParamsPerTerm * j;
            // complex standard normal: unit variance split over both parts
            q[0] = g_scale * normal(rng) / std::sqrt(2.0);
            q[1] = g_scale * normal(rng) / std::sqrt(2.0);
            q[2] = log_lo + (log_hi - log_lo) * uniform(rng);
            q[3] = im_hi * (2.0 * uniform(rng) - 1.0);
        }
        attempts[r] = run_restart(std::move(x), t, scaled, p, options.irls_iterations, bounds);
    });

    std::size_t best_index = 0;
    int converged = 0;
    for (std::size_t r = 0; r < attempts.size(); ++r) {
        if (attempts[r].converged) ++converged;
        if (attempts[r].x.size() == 0) continue;
        const bool best_converged = attempts[best_index].converged;
        // converged restarts outrank non-converged ones; otherwise objective order
        if (attempts[best_index].x.size() == 0 ||
            (attempts[r].converged && !best_converged) ||
            (attempts[r].converged == best_converged && better(attempts[r], attempts[best_index]))) {
            best_index = r;
        }
    }
    const Attempt& best = attempts[best_index];

    FitResult result;
    result.report.tau0 = tau0;
    result.report.p = p;
    result.report.restarts_used = options.restarts;
    result.report.restarts_converged = converged;
    result.report.grid_points = n;
    result.report.seed = options.seed;
    if (best.x.size() == 0) throw FitError("fit_bcf: every restart diverged", result);

    for (int j = 0; j < n_terms; ++j) {
        const double* q = best.x.data() + kParamsPerTerm * j;
        result.bcf.terms.push_back({cplx(q[0], q[1]) * amax, rate(q[2], q[3], bounds) / tau0});
    }
    const FitErrors errors = fit_error(result.bcf, target, p);
    result.report.rel_p_error = errors.rel_p_error;
    result.report.max_rel_error = errors.max_rel_error;

    bool feasible = true;
    for (const auto& term : result.bcf.terms) feasible = feasible && term.W.real() > 0.0;
    if (!feasible) throw FitError("fit_bcf: best fit has a non-decaying term", result);
    if (converged == 0) throw FitError("fit_bcf: no restart converged", result);
    return result;
}

void write_fit(std::ostream& os, const ExponentialBCF& e, const FitReport& report) {
    std::ostringstream out;
    out << std::scientific << std::setprecision(16);
    out << e.size() << ' ' << report.p << ' ' << report.tau0 << ' ' << report.max_rel_error << '\n';
    for (const auto& t : e.terms) {
        out << t.G.real() << ' ' << t.G.imag() << ' ' << t.W.real() << ' ' << t.W.imag() << '\n';
    }
    os << out.str();
}

FitResult read_fit(std::istream& is) {
    FitResult result;
    std::size_t n = 0;
    if (!(is >> n >> result.report.p >> result.report.tau0 >> result.report.max_rel_error))
        throw ConfigError("read_fit: malformed header");
    for (std::size_t j = 0; j < n; ++j) {
        double gr, gi, wr, wi;
        if (!(is >> gr >> gi >> wr >> wi))
            throw ConfigError("read_fit: expected " + std::to_string(n) + " terms, got " + std::to_string(j));
        result.bcf.terms.push_back({cplx(gr, gi), cplx(wr, wi)});
    }
    try {
        result.bcf = ExponentialBCF::make(std::move(result.bcf.terms));
    } catch (const DomainError& e) {
        throw ConfigError(std::string("read_fit: ") + e.what());
    }
    return result;
}

}  // namespace hops
