#include "sae/simd/kernels.hpp"

#include <arm_neon.h>

namespace sae::simd::detail
{
namespace
{

void axpy_neon(double alpha, const double* x, double* y, std::size_t n)
{
    const float64x2_t a = vdupq_n_f64(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        float64x2_t y0 = vld1q_f64(y + i);
        float64x2_t y1 = vld1q_f64(y + i + 2);
        y0 = vfmaq_f64(y0, a, vld1q_f64(x + i));
        y1 = vfmaq_f64(y1, a, vld1q_f64(x + i + 2));
        vst1q_f64(y + i, y0);
        vst1q_f64(y + i + 2, y1);
    }
    for (; i < n; ++i) {
        y[i] += alpha * x[i];
    }
}

void affine_neon(const double* phi, double keep, double shift, double* out, std::size_t n)
{
    const float64x2_t k = vdupq_n_f64(keep);
    const float64x2_t s = vdupq_n_f64(shift);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        vst1q_f64(out + i, vfmaq_f64(s, k, vld1q_f64(phi + i)));
    }
    for (; i < n; ++i) {
        out[i] = keep * phi[i] + shift;
    }
}

double sum_neon(const double* x, std::size_t n)
{
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vaddq_f64(acc0, vld1q_f64(x + i));
        acc1 = vaddq_f64(acc1, vld1q_f64(x + i + 2));
    }
    double total = vaddvq_f64(vaddq_f64(acc0, acc1));
    for (; i < n; ++i) {
        total += x[i];
    }
    return total;
}

} // namespace

const KernelTable neon_kernels{axpy_neon, affine_neon, sum_neon};

} // namespace sae::simd::detail
