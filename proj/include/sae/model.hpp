#pragma once

// Renewal model with cross-region transfer and a Gamma-distributed regional
// reproduction number:
//
//   I_c(t) | R_c(t) ~ Pois(R_c(t) * Lambda_c(t)),   R_c(t) ~ Gamma(a_t, s_t)
//   Phi_c(t)    = sum_tau I_c(t - tau) w(tau)
//   Lambda_c(t) = (1 - p_t) Phi_c(t) + p_t / (K - 1) * sum_{c' != c} Phi_c'(t)
//
// Marginally I_c(t) is negative binomial; R_c(t) given I_c(t) is Gamma again.

#include "sae/generation_time.hpp"
#include "sae/incidence_panel.hpp"
#include "sae/linalg.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace sae
{

/// Finite stand-in for log(0) inside likelihood sums handed to the optimizer.
inline constexpr double kLogZeroSentinel = -1e100;

/// Expected active cases and the Poisson mean divisor after redistribution, per region.
struct ActiveCases
{
    std::vector<double> phi;
    std::vector<double> lambda;
};

/// Day-t parameters of the regional Gamma(a, s) law plus the transfer fraction p.
struct DayParams
{
    double a = 1.0;
    double s = 1.0;
    double p = 0.0;
    /// Covariance of (a, s, p) in natural coordinates; absent when the observed
    /// information could not be inverted.
    std::optional<Mat3> cov;
    bool converged = false;
    /// False when p sits on the logit clamp or the likelihood is flat in p.
    bool p_identified = true;
    double log_likelihood = 0.0;

    double mean() const { return a * s; }
};

/// Gamma(shape, scale) law of a regional reproduction number.
struct GammaPosterior
{
    double shape = 1.0;
    double scale = 1.0;

    double mean() const { return shape * scale; }
    double variance() const { return shape * scale * scale; }
    double cdf(double x) const;
    /// Bisection on the regularized incomplete gamma; see gamma_quantile().
    double quantile(double q) const;
};

/// Phi_c(t) for every region. Lags reaching before the first panel day contribute
/// zero. t may equal num_days() (one day past the panel); beyond that IndexError.
std::vector<double> compute_phi(const IncidencePanel& panel, const GenerationTimePmf& w, std::size_t t);

/// Phi for all days at once, day-major (num_days * num_regions).
std::vector<double> compute_phi_all(const IncidencePanel& panel, const GenerationTimePmf& w);

/// Lambda_c from Phi_c with transfer fraction p. Requires K >= 2 and p in [0, 1].
std::vector<double> compute_lambda(std::span<const double> phi, double p);

/// Allocation-free variant: `phi_total` must equal the sum of `phi`.
void compute_lambda_into(std::span<const double> phi, double phi_total, double p, std::span<double> lambda);

ActiveCases compute_active_cases(const IncidencePanel& panel, const GenerationTimePmf& w, std::size_t t, double p);

/// Country-level ratio I(t) / Phi(t) where both are summed over all regions of `panel`.
/// Empty when Phi(t) = 0.
std::optional<double> naive_r_hat(const IncidencePanel& panel, const GenerationTimePmf& w, std::size_t t);

/// log P(I = i) for the Gamma(a, s)-mixed Poisson with mean divisor Lambda, where m = s * Lambda.
/// m = 0 is the point mass at zero: 0 for i = 0, -infinity otherwise.
double negbin_logpmf(std::int64_t i, double a, double m);

/// Conjugate update of Gamma(a, s) by one Poisson observation i with mean R * lambda.
GammaPosterior posterior(double a, double s, double lambda, std::int64_t i);
GammaPosterior posterior(const DayParams& prior, double lambda, std::int64_t i);

/// Quantile of a Gamma law; q must lie in (0, 1).
double gamma_quantile(const GammaPosterior& law, double q);

} // namespace sae
