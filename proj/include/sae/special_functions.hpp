#pragma once

namespace sae
{

/// ln Gamma(x) for x > 0 (Lanczos approximation, g = 671/128, 14 terms).
/// Relative error below 1e-12 on [0.5, 1e6] away from the zeros at 1 and 2, where the
/// absolute error is below 1e-14. Throws DomainError for x <= 0 or non-finite x.
double log_gamma(double x);

/// ln Gamma(a + n) - ln Gamma(a) for a > 0, n >= 0, without the cancellation of the
/// plain difference when a is large.
double log_rising_factorial(double a, long long n);

/// ln(1 + u) - u for u > -1, without the cancellation of the direct form near u = 0.
double log1pmx(double u);

/// ln Gamma(x + 1) - [(x + 1/2) ln x - x + ln sqrt(2 pi)], accurate for x >= 30.
double stirling_correction(double x);

/// Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a), a > 0, x >= 0.
///
/// Power series for x < a + 1, Lentz continued fraction for the complement otherwise;
/// for large a the integral is evaluated by Gauss-Legendre quadrature around the saddle.
double regularized_gamma_p(double a, double x);

/// Q(a, x) = 1 - P(a, x), computed without cancellation.
double regularized_gamma_q(double a, double x);

/// Inverse of P(shape, .) for unit scale: Newton steps kept inside a bisection bracket,
/// iterated to machine precision. Requires 0 < q < 1.
double gamma_quantile_unit(double shape, double q);

/// Standard normal CDF.
double normal_cdf(double z);

/// Standard normal quantile (Acklam's rational approximation plus one Halley step).
double normal_quantile(double p);

} // namespace sae
