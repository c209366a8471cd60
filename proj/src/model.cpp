#include "sae/model.hpp"

#include "sae/errors.hpp"
#include "sae/simd/kernels.hpp"
#include "sae/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace sae
{
namespace
{

void check_day(const IncidencePanel& panel, std::size_t t)
{
    if (t > panel.num_days()) {
        throw IndexError("day index " + std::to_string(t) + " outside panel of " +
                         std::to_string(panel.num_days()) + " days");
    }
}

} // namespace

double GammaPosterior::cdf(double x) const
{
    if (x <= 0.0) {
        return 0.0;
    }
    return regularized_gamma_p(shape, x / scale);
}

double GammaPosterior::quantile(double q) const
{
    return gamma_quantile(*this, q);
}

std::vector<double> compute_phi(const IncidencePanel& panel, const GenerationTimePmf& w, std::size_t t)
{
    check_day(panel, t);
    const std::size_t k = panel.num_regions();
    std::vector<double> phi(k, 0.0);
    std::vector<double> history(k);
    for (int tau = w.support_start(); tau <= w.support_end(); ++tau) {
        if (static_cast<std::size_t>(tau) > t) {
            break;
        }
        const auto day = panel.day(t - static_cast<std::size_t>(tau));
        std::transform(day.begin(), day.end(), history.begin(), [](std::int64_t v) { return static_cast<double>(v); });
        simd::axpy(w(tau), history, phi);
    }
    return phi;
}

std::vector<double> compute_phi_all(const IncidencePanel& panel, const GenerationTimePmf& w)
{
    const std::size_t k = panel.num_regions();
    const std::size_t days = panel.num_days();
    std::vector<double> counts(panel.counts().size());
    std::transform(panel.counts().begin(), panel.counts().end(), counts.begin(),
                   [](std::int64_t v) { return static_cast<double>(v); });
    std::vector<double> phi(k * days, 0.0);
    const std::span<const double> all_counts{counts};
    const std::span<double> all_phi{phi};
    for (std::size_t t = 0; t < days; ++t) {
        for (int tau = w.support_start(); tau <= w.support_end() && static_cast<std::size_t>(tau) <= t; ++tau) {
            const std::size_t source = t - static_cast<std::size_t>(tau);
            simd::axpy(w(tau), all_counts.subspan(source * k, k), all_phi.subspan(t * k, k));
        }
    }
    return phi;
}

void compute_lambda_into(std::span<const double> phi, double phi_total, double p, std::span<double> lambda)
{
    const std::size_t k = phi.size();
    if (k < 2) {
        throw InvalidConfiguration("cross-region transfer needs at least two regions");
    }
    if (!(p >= 0.0 && p <= 1.0)) {
        throw DomainError("transfer fraction must lie in [0, 1]");
    }
    // (1 - p) phi_c + q (total - phi_c) with q = p / (K - 1)
    const double q = p / static_cast<double>(k - 1);
    const double keep = (1.0 - p) - q;
    simd::affine(phi, keep, q * phi_total, lambda);
    if (keep < 0.0) {
        for (double& v : lambda) {
            v = std::max(v, 0.0);
        }
    }
}

std::vector<double> compute_lambda(std::span<const double> phi, double p)
{
    std::vector<double> lambda(phi.size());
    if (phi.size() < 2) {
        throw InvalidConfiguration("cross-region transfer needs at least two regions");
    }
    compute_lambda_into(phi, simd::sum(phi), p, lambda);
    return lambda;
}

ActiveCases compute_active_cases(const IncidencePanel& panel, const GenerationTimePmf& w, std::size_t t, double p)
{
    ActiveCases out;
    out.phi = compute_phi(panel, w, t);
    out.lambda = compute_lambda(out.phi, p);
    return out;
}

std::optional<double> naive_r_hat(const IncidencePanel& panel, const GenerationTimePmf& w, std::size_t t)
{
    if (t >= panel.num_days()) {
        throw IndexError("day index " + std::to_string(t) + " outside panel");
    }
    const auto phi = compute_phi(panel, w, t);
    double phi_total = 0.0;
    for (double v : phi) {
        phi_total += v;
    }
    if (!(phi_total > 0.0)) {
        return std::nullopt;
    }
    double cases = 0.0;
    for (auto v : panel.day(t)) {
        cases += static_cast<double>(v);
    }
    return cases / phi_total;
}

double negbin_logpmf(std::int64_t i, double a, double m)
{
    if (i < 0) {
        throw DomainError("negbin_logpmf: count must be nonnegative");
    }
    if (!(a > 0.0) || !std::isfinite(a)) {
        throw DomainError("negbin_logpmf: shape must be positive and finite");
    }
    if (!(m >= 0.0) || !std::isfinite(m)) {
        throw DomainError("negbin_logpmf: mean parameter must be finite and nonnegative");
    }
    if (m == 0.0) {
        return i == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
    }
    const double log1p_m = std::log1p(m);
    if (i == 0) {
        return -a * log1p_m;
    }
    const double count = static_cast<double>(i);
    if (a >= 30.0 && count >= 30.0) {
        // Binomial deviance form: every term is O(1), so nothing large cancels.
        // pmf = a / (a + i) * C(a + i, a) p^a (1 - p)^i with p = 1 / (1 + m).
        const double n = a + count;
        const double excess = count - a * m; // i - E[i]
        const double bd0_a = -a * log1pmx(excess / (a * (1.0 + m)));
        const double bd0_i = -count * log1pmx(-excess / (count * (1.0 + m)));
        return std::log(a / n) + stirling_correction(n) - stirling_correction(a) - stirling_correction(count) -
               bd0_a - bd0_i - 0.5 * std::log(2.0 * std::numbers::pi * a * count / n);
    }
    return log_rising_factorial(a, i) - log_gamma(count + 1.0) + count * (std::log(m) - log1p_m) - a * log1p_m;
}

GammaPosterior posterior(double a, double s, double lambda, std::int64_t i)
{
    if (!(a > 0.0) || !(s > 0.0)) {
        throw DomainError("posterior: prior shape and scale must be positive");
    }
    if (!(lambda >= 0.0) || i < 0) {
        throw DomainError("posterior: lambda and count must be nonnegative");
    }
    return GammaPosterior{a + static_cast<double>(i), s / (1.0 + s * lambda)};
}

GammaPosterior posterior(const DayParams& prior, double lambda, std::int64_t i)
{
    return posterior(prior.a, prior.s, lambda, i);
}

double gamma_quantile(const GammaPosterior& law, double q)
{
    if (!(q > 0.0 && q < 1.0)) {
        throw DomainError("gamma quantile: probability must lie in (0, 1)");
    }
    return law.scale * gamma_quantile_unit(law.shape, q);
}

} // namespace sae
