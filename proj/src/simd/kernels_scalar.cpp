#include "sae/simd/kernels.hpp"

namespace sae::simd::detail
{
namespace
{

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n)
{
    for (std::size_t i = 0; i < n; ++i) {
        y[i] += alpha * x[i];
    }
}

void affine_scalar(const double* phi, double keep, double shift, double* out, std::size_t n)
{
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = keep * phi[i] + shift;
    }
}

double sum_scalar(const double* x, std::size_t n)
{
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        total += x[i];
    }
    return total;
}

} // namespace

const KernelTable scalar_kernels{axpy_scalar, affine_scalar, sum_scalar};

} // namespace sae::simd::detail
