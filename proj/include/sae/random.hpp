#pragma once

// Samplers with a fixed, documented draw order on top of std::mt19937_64. The
// <random> distributions are implementation-defined, so simulations built on them would
// not reproduce across standard libraries; these are.

#include <cstdint>
#include <random>
#include <utility>

namespace sae::random
{

using Engine = std::mt19937_64;

/// Uniform on [0, 1) from the top 53 bits of one engine output.
double uniform01(Engine& engine);

/// Two independent N(0, 1) variates from two uniforms (Box-Muller).
std::pair<double, double> normal_pair(Engine& engine);

/// Poisson variate. Sequential inversion (one uniform) for mean < 10, Hormann's
/// transformed rejection (PTRS) otherwise.
std::int64_t poisson(Engine& engine, double mean);

/// Gamma(shape, scale) variate (Marsaglia-Tsang; shape < 1 via the U^(1/shape) boost).
double gamma(Engine& engine, double shape, double scale);

/// SplitMix64 finalizer; used to derive replicate seeds from a base seed.
std::uint64_t mix_seed(std::uint64_t seed);

} // namespace sae::random
