#include "sae/special_functions.hpp"

#include "sae/errors.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace sae
{
namespace
{

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = std::numeric_limits<double>::min() / kEps;

// Above this shape the series and continued fraction need O(sqrt(a)) terms; the
// quadrature route costs a fixed number of evaluations.
constexpr double kQuadratureShape = 100.0;

constexpr int kGaussPoints = 40;

struct GaussLegendre
{
    std::array<double, kGaussPoints> nodes{};   // on [0, 1]
    std::array<double, kGaussPoints> weights{}; // sum to 1
};

// Nodes by Newton iteration on P_n from the Chebyshev-like initial guesses.
GaussLegendre make_gauss_legendre()
{
    GaussLegendre rule;
    constexpr int n = kGaussPoints;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double derivative = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p1 = 1.0;
            double p2 = 0.0;
            for (int j = 1; j <= n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
            }
            derivative = n * (z * p1 - p2) / (z * z - 1.0);
            const double step = p1 / derivative;
            z -= step;
            if (std::abs(step) < 1e-16) {
                break;
            }
        }
        const double w = 2.0 / ((1.0 - z * z) * derivative * derivative);
        // map [-1, 1] -> [0, 1]
        rule.nodes[static_cast<std::size_t>(i)] = 0.5 * (1.0 - z);
        rule.nodes[static_cast<std::size_t>(n - 1 - i)] = 0.5 * (1.0 + z);
        rule.weights[static_cast<std::size_t>(i)] = 0.5 * w;
        rule.weights[static_cast<std::size_t>(n - 1 - i)] = 0.5 * w;
    }
    return rule;
}

const GaussLegendre& gauss_legendre()
{
    static const GaussLegendre rule = make_gauss_legendre();
    return rule;
}

double series_p(double a, double x)
{
    double ap = a;
    double term = 1.0 / a;
    double total = term;
    const int max_iter = 1000 + static_cast<int>(20.0 * std::sqrt(a));
    for (int n = 0; n < max_iter; ++n) {
        ap += 1.0;
        term *= x / ap;
        total += term;
        if (std::abs(term) < std::abs(total) * kEps) {
            break;
        }
    }
    return total * std::exp(-x + a * std::log(x) - log_gamma(a));
}

double continued_fraction_q(double a, double x)
{
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    const int max_iter = 1000 + static_cast<int>(20.0 * std::sqrt(a));
    for (int i = 1; i < max_iter; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kTiny) {
            d = kTiny;
        }
        c = b + an / c;
        if (std::abs(c) < kTiny) {
            c = kTiny;
        }
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) <= kEps) {
            break;
        }
    }
    return std::exp(-x + a * std::log(x) - log_gamma(a)) * h;
}


// Signed tail integral for large a: returns P(a, x) when x <= a - 1 (integrating the
// lower tail) and Q(a, x) otherwise. `upper` reports which one.
double quadrature_tail(double a, double x, bool& upper)
{
    const double a1 = a - 1.0;
    const double sqrt_a1 = std::sqrt(a1);
    upper = x > a1;
    double limit;
    if (upper) {
        limit = std::max(a1 + 12.0 * sqrt_a1, x + 9.0 * sqrt_a1);
    }
    else {
        limit = std::max(0.0, std::min(a1 - 10.0 * sqrt_a1, x - 9.0 * sqrt_a1));
    }
    const auto& rule = gauss_legendre();
    double total = 0.0;
    // Offsets from the mode are formed directly; t = a1 + d would round away d's low bits.
    const double x_offset = x - a1;
    const double width = limit - x;
    for (int j = 0; j < kGaussPoints; ++j) {
        const double d = x_offset + width * rule.nodes[static_cast<std::size_t>(j)];
        // integrand t^(a-1) e^-t scaled by its value at the mode a1
        total += rule.weights[static_cast<std::size_t>(j)] * std::exp(a1 * log1pmx(d / a1));
    }
    // a1^a1 e^-a1 / Gamma(a) = exp(-ln sqrt(2 pi a1) - stirling_correction(a1))
    const double prefactor =
        std::exp(-0.5 * std::log(2.0 * std::numbers::pi * a1) - stirling_correction(a1));
    const double signed_mass = total * (limit - x) * prefactor;
    return upper ? signed_mass : -signed_mass;
}

void check_gamma_args(double a, double x)
{
    if (!(a > 0.0) || !std::isfinite(a)) {
        throw DomainError("incomplete gamma: shape must be positive and finite");
    }
    if (!(x >= 0.0) || std::isnan(x)) {
        throw DomainError("incomplete gamma: argument must be nonnegative");
    }
}

// ln of the Gamma(a, 1) density, in Stirling form for large a so the O(a ln a) terms cancel.
double log_gamma_density(double a, double x)
{
    if (a < 30.0) {
        return (a - 1.0) * std::log(x) - x - log_gamma(a);
    }
    return a * log1pmx((x - a) / a) - std::log(x) + 0.5 * std::log(a / (2.0 * std::numbers::pi)) -
           stirling_correction(a);
}

} // namespace

double log1pmx(double u)
{
    if (std::abs(u) > 0.25) {
        return std::log1p(u) - u;
    }
    // -u^2/2 + u^3/3 - u^4/4 + ...
    double power = u * u;
    double total = 0.0;
    for (int n = 2; n < 200; ++n) {
        const double term = power / n;
        total += (n % 2 == 0) ? -term : term;
        if (std::abs(term) <= kEps * std::abs(total)) {
            break;
        }
        power *= u;
    }
    return total;
}

// Same series for ln Gamma(x) - [(x - 1/2) ln x - x + ln sqrt(2 pi)].
double stirling_correction(double x)
{
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    return inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)));
}

double log_rising_factorial(double a, long long n)
{
    if (!(a > 0.0) || n < 0) {
        throw DomainError("log_rising_factorial: need a > 0 and n >= 0");
    }
    if (n <= 16) {
        double total = 0.0;
        for (long long j = 0; j < n; ++j) {
            total += std::log(a + static_cast<double>(j));
        }
        return total;
    }
    const double count = static_cast<double>(n);
    if (a >= 30.0) {
        // Stirling form of both terms: ln Gamma(x) = (x - 1/2) ln x - x + ln sqrt(2 pi) + correction(x).
        // Each remaining piece is O(n log b); the O(a log a) parts cancel analytically.
        const double b = a + count;
        return (a - 0.5) * std::log1p(count / a) + count * std::log(b) - count + stirling_correction(b) -
               stirling_correction(a);
    }
    return log_gamma(a + count) - log_gamma(a);
}

double log_gamma(double x)
{
    if (!(x > 0.0) || !std::isfinite(x)) {
        throw DomainError("log_gamma: argument must be positive and finite");
    }
    static constexpr std::array<double, 14> coefficients{
        57.1562356658629235,     -59.5979603554754912,    14.1360979747417471,     -0.491913816097620199,
        .339946499848118887e-4,  .465236289270485756e-4,  -.983744753048795646e-4, .158088703224912494e-3,
        -.210264441724104883e-3, .217439618115212643e-3,  -.164318106536763890e-3, .844182239838527433e-4,
        -.261908384015814087e-4, .368991826595316234e-5};
    double y = x;
    double tmp = x + 5.24218750000000000; // g + 1/2 with g = 671/128
    tmp = (x + 0.5) * std::log(tmp) - tmp;
    double series = 0.999999999999997092;
    for (double c : coefficients) {
        series += c / ++y;
    }
    return tmp + std::log(2.5066282746310005 * series / x);
}

double regularized_gamma_p(double a, double x)
{
    check_gamma_args(a, x);
    if (x == 0.0) {
        return 0.0;
    }
    if (std::isinf(x)) {
        return 1.0;
    }
    if (a >= kQuadratureShape) {
        bool upper = false;
        const double tail = quadrature_tail(a, x, upper);
        return upper ? 1.0 - tail : tail;
    }
    if (x < a + 1.0) {
        return series_p(a, x);
    }
    return 1.0 - continued_fraction_q(a, x);
}

double regularized_gamma_q(double a, double x)
{
    check_gamma_args(a, x);
    if (x == 0.0) {
        return 1.0;
    }
    if (std::isinf(x)) {
        return 0.0;
    }
    if (a >= kQuadratureShape) {
        bool upper = false;
        const double tail = quadrature_tail(a, x, upper);
        return upper ? tail : 1.0 - tail;
    }
    if (x < a + 1.0) {
        return 1.0 - series_p(a, x);
    }
    return continued_fraction_q(a, x);
}

double gamma_quantile_unit(double shape, double q)
{
    if (!(q > 0.0 && q < 1.0)) {
        throw DomainError("gamma quantile: probability must lie in (0, 1)");
    }
    if (!(shape > 0.0) || !std::isfinite(shape)) {
        throw DomainError("gamma quantile: shape must be positive and finite");
    }
    // Bracket around the Wilson-Hilferty guess, then bisect to machine precision.
    const double z = normal_quantile(q);
    const double c = 1.0 / (9.0 * shape);
    double guess = shape * std::pow(std::max(1.0 - c + z * std::sqrt(c), 1e-3), 3.0);
    if (!(guess > 0.0) || !std::isfinite(guess)) {
        guess = shape;
    }
    double lo = guess;
    double hi = guess;
    while (lo > std::numeric_limits<double>::min() && regularized_gamma_p(shape, lo) > q) {
        lo *= 0.5;
    }
    if (!(lo > std::numeric_limits<double>::min())) {
        lo = 0.0;
    }
    while (regularized_gamma_p(shape, hi) < q) {
        hi *= 2.0;
        if (!std::isfinite(hi)) {
            throw NumericError("gamma quantile: failed to bracket");
        }
    }
    // Newton on P(a, x) - q, falling back to bisection whenever the step leaves the bracket.
    double x = std::clamp(guess, lo, hi);
    for (int iter = 0; iter < 2000; ++iter) {
        const double residual = regularized_gamma_p(shape, x) - q;
        if (residual < 0.0) {
            lo = x;
        }
        else if (residual > 0.0) {
            hi = x;
        }
        else {
            return x;
        }
        const double density = std::exp(log_gamma_density(shape, x));
        double next = x - residual / density;
        if (!(next > lo && next < hi) || !std::isfinite(next)) {
            next = 0.5 * (lo + hi);
        }
        if (std::abs(next - x) <= 4.0 * std::numeric_limits<double>::epsilon() * x || next <= lo || next >= hi) {
            return next;
        }
        x = next;
    }
    return x;
}

double normal_cdf(double z)
{
    return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

double normal_quantile(double p)
{
    if (!(p > 0.0 && p < 1.0)) {
        throw DomainError("normal quantile: probability must lie in (0, 1)");
    }
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                   1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                   6.680131188771972e+01, -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                   -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                   3.754408661907416e+00};
    constexpr double p_low = 0.02425;
    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    else if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    }
    else {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    // Halley refinement
    const double e = normal_cdf(x) - p;
    const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
    return x;
}

} // namespace sae
