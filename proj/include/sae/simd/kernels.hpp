#pragma once

// Data-parallel inner loops of the model: the generation-time convolution (axpy over
// regions), the cross-region redistribution of active cases, and reductions.
//
// Every kernel has a scalar reference implementation. Vector variants (AVX2+FMA on x86-64,
// NEON on AArch64) are picked at runtime from CPU features; SAE_SIMD=scalar|avx2|neon|auto
// in the environment overrides the choice at first use.

#include <cstddef>
#include <span>
#include <string_view>

namespace sae::simd
{

enum class Variant
{
    Scalar,
    Avx2,
    Neon,
};

std::string_view name(Variant variant);

/// True if `variant` was compiled in and the running CPU supports it.
bool is_supported(Variant variant);

/// Variant used by the dispatching kernels below.
Variant active_variant();

/// Forces a variant. Throws InvalidConfiguration if it is not supported here.
void set_variant(Variant variant);

/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

/// out[i] = keep * phi[i] + shift
void affine(std::span<const double> phi, double keep, double shift, std::span<double> out);

double sum(std::span<const double> x);

/// Kernel set of one variant. Exposed so tests can compare variants directly.
struct KernelTable
{
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    void (*affine)(const double* phi, double keep, double shift, double* out, std::size_t n);
    double (*sum)(const double* x, std::size_t n);
};

/// Throws InvalidConfiguration if the variant is unsupported.
const KernelTable& kernels(Variant variant);

namespace detail
{
extern const KernelTable scalar_kernels;
#if defined(SAE_HAVE_AVX2)
extern const KernelTable avx2_kernels;
#endif
#if defined(SAE_HAVE_NEON)
extern const KernelTable neon_kernels;
#endif
} // namespace detail

} // namespace sae::simd
