#include "sae/random.hpp"

#include "sae/errors.hpp"
#include "sae/special_functions.hpp"

#include <cmath>
#include <numbers>

namespace sae::random
{

double uniform01(Engine& engine)
{
    return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

std::pair<double, double> normal_pair(Engine& engine)
{
    // 1 - u lies in (0, 1], so the log is finite.
    const double u1 = 1.0 - uniform01(engine);
    const double u2 = uniform01(engine);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    return {radius * std::cos(angle), radius * std::sin(angle)};
}

std::int64_t poisson(Engine& engine, double mean)
{
    if (!(mean >= 0.0) || !std::isfinite(mean)) {
        throw DomainError("poisson: mean must be finite and nonnegative");
    }
    if (mean == 0.0) {
        return 0;
    }
    if (mean < 10.0) {
        const double u = uniform01(engine);
        double p = std::exp(-mean);
        double cdf = p;
        std::int64_t k = 0;
        while (u > cdf) {
            ++k;
            p *= mean / static_cast<double>(k);
            cdf += p;
            if (p == 0.0 && cdf < u) {
                break; // roundoff: the remaining tail is below double resolution
            }
        }
        return k;
    }
    const double sqrt_mean = std::sqrt(mean);
    const double log_mean = std::log(mean);
    const double b = 0.931 + 2.53 * sqrt_mean;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
        const double u = uniform01(engine) - 0.5;
        const double v = uniform01(engine);
        const double us = 0.5 - std::abs(u);
        const auto k = static_cast<std::int64_t>(std::floor((2.0 * a / us + b) * u + mean + 0.43));
        if (us >= 0.07 && v <= v_r) {
            return k;
        }
        if (k < 0 || (us < 0.013 && v > us)) {
            continue;
        }
        const double kd = static_cast<double>(k);
        if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
            -mean + kd * log_mean - log_gamma(kd + 1.0)) {
            return k;
        }
    }
}

double gamma(Engine& engine, double shape, double scale)
{
    if (!(shape > 0.0) || !(scale > 0.0)) {
        throw DomainError("gamma: shape and scale must be positive");
    }
    if (shape < 1.0) {
        const double boost = std::pow(1.0 - uniform01(engine), 1.0 / shape);
        return gamma(engine, shape + 1.0, scale) * boost;
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x;
        double v;
        do {
            x = normal_pair(engine).first;
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = 1.0 - uniform01(engine);
        if (u < 1.0 - 0.0331 * x * x * x * x || std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
            return d * v * scale;
        }
    }
}

std::uint64_t mix_seed(std::uint64_t seed)
{
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace sae::random
