// expfit.hpp - sum-of-exponentials approximation of correlation kernels

#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "hopskit/types.hpp"

namespace hops {

struct ExpTerm {
    cplx G;  // amplitude
    cplx W;  // rate, Re W > 0
};

// α(τ) ≈ Σ_j G_j exp(-W_j τ)
struct ExponentialBCF {
    std::vector<ExpTerm> terms;

    // Throws DomainError if empty or any Re W_j <= 0.
    static ExponentialBCF make(std::vector<ExpTerm> terms);

    std::size_t size() const noexcept { return terms.size(); }
};

// Kernel samples on the uniform grid τ_i = i τ₀/(n-1), i = 0..n-1.
struct SampledKernel {
    double tau0{0.0};
    std::vector<cplx> values;

    static SampledKernel sample(const std::function<cplx(double)>& kernel, double tau0,
                                std::size_t points = 1000);

    double tau(std::size_t i) const noexcept;
    std::size_t size() const noexcept { return values.size(); }
};

struct FitReport {
    double tau0{0.0};
    double p{2.0};
    double rel_p_error{0.0};    // |α_apx - α|_p / |α|_p over the grid
    double max_rel_error{0.0};  // max |α_apx - α| / max |α|
    int restarts_used{0};
    int restarts_converged{0};
    std::size_t grid_points{0};
    std::uint64_t seed{0};
};

struct FitOptions {
    int restarts{64};
    std::uint64_t seed{0};
    // Upper frequency scale for initial rates: Re W in [1/τ₀, 10 ω], Im W in
    // [-10 ω, 10 ω]. Zero selects a tenth of the grid Nyquist frequency.
    double omega_scale{0.0};
    int irls_iterations{30};
    // Upper bound on Re W and |Im W|; zero leaves only the grid bounds.
    double max_rate{0.0};
};

struct FitResult {
    ExponentialBCF bcf;
    FitReport report;
};

// No restart reached a converged local optimum; carries the best attempt.
class FitError : public std::runtime_error {
public:
    FitError(const std::string& what, FitResult best)
        : std::runtime_error(what), best_(std::move(best)) {}
    const FitResult& best() const noexcept { return best_; }

private:
    FitResult best_;
};

cplx eval_expsum(const ExponentialBCF& e, double tau);

// Multi-start Levenberg-Marquardt on the stacked real/imaginary residuals; the
// p-norm is reached by iteratively reweighted least squares. Rates stay within
// Re W <= 1/h and |Im W| <= π/h for the grid step h. Deterministic in
// (target, n_terms, p, options) regardless of thread count.
FitResult fit_bcf(const SampledKernel& target, int n_terms, double p, const FitOptions& options = {});

struct FitErrors {
    double rel_p_error;
    double max_rel_error;
};

FitErrors fit_error(const ExponentialBCF& e, const SampledKernel& target, double p);

// Re Σ_j G_j / (W_j - iω): the spectral density implied by the fitted kernel.
double reconstruct_sd(const ExponentialBCF& e, double omega);

// Header "N p tau0 max_rel_err", then "Re(G) Im(G) Re(W) Im(W)" per term.
void write_fit(std::ostream& os, const ExponentialBCF& e, const FitReport& report);
FitResult read_fit(std::istream& is);

}  // namespace hops
