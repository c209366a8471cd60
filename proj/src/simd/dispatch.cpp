#include "sae/simd/kernels.hpp"

#include "sae/errors.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace sae::simd
{
namespace
{

bool cpu_has_avx2()
{
#if defined(SAE_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Variant best_variant()
{
    if (is_supported(Variant::Avx2)) {
        return Variant::Avx2;
    }
    if (is_supported(Variant::Neon)) {
        return Variant::Neon;
    }
    return Variant::Scalar;
}

Variant initial_variant()
{
    const char* env = std::getenv("SAE_SIMD");
    if (env == nullptr) {
        return best_variant();
    }
    const std::string requested{env};
    for (Variant v : {Variant::Scalar, Variant::Avx2, Variant::Neon}) {
        if (requested == name(v) && is_supported(v)) {
            return v;
        }
    }
    return best_variant();
}

std::atomic<const KernelTable*>& active_table()
{
    static std::atomic<const KernelTable*> table{&kernels(initial_variant())};
    return table;
}

} // namespace

std::string_view name(Variant variant)
{
    switch (variant) {
    case Variant::Scalar:
        return "scalar";
    case Variant::Avx2:
        return "avx2";
    case Variant::Neon:
        return "neon";
    }
    return "unknown";
}

bool is_supported(Variant variant)
{
    switch (variant) {
    case Variant::Scalar:
        return true;
    case Variant::Avx2:
        return cpu_has_avx2();
    case Variant::Neon:
#if defined(SAE_HAVE_NEON)
        return true;
#else
        return false;
#endif
    }
    return false;
}

const KernelTable& kernels(Variant variant)
{
    if (!is_supported(variant)) {
        throw InvalidConfiguration("SIMD variant '" + std::string(name(variant)) + "' is not available");
    }
    switch (variant) {
#if defined(SAE_HAVE_AVX2)
    case Variant::Avx2:
        return detail::avx2_kernels;
#endif
#if defined(SAE_HAVE_NEON)
    case Variant::Neon:
        return detail::neon_kernels;
#endif
    default:
        return detail::scalar_kernels;
    }
}

Variant active_variant()
{
    const KernelTable* table = active_table().load(std::memory_order_acquire);
    for (Variant v : {Variant::Avx2, Variant::Neon}) {
        if (is_supported(v) && table == &kernels(v)) {
            return v;
        }
    }
    return Variant::Scalar;
}

void set_variant(Variant variant)
{
    active_table().store(&kernels(variant), std::memory_order_release);
}

void axpy(double alpha, std::span<const double> x, std::span<double> y)
{
    if (x.size() != y.size()) {
        throw InvalidConfiguration("axpy: length mismatch");
    }
    active_table().load(std::memory_order_acquire)->axpy(alpha, x.data(), y.data(), x.size());
}

void affine(std::span<const double> phi, double keep, double shift, std::span<double> out)
{
    if (phi.size() != out.size()) {
        throw InvalidConfiguration("affine: length mismatch");
    }
    active_table().load(std::memory_order_acquire)->affine(phi.data(), keep, shift, out.data(), phi.size());
}

double sum(std::span<const double> x)
{
    return active_table().load(std::memory_order_acquire)->sum(x.data(), x.size());
}

} // namespace sae::simd
