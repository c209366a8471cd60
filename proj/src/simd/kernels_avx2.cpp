// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include "sae/simd/kernels.hpp"

#include <immintrin.h>

namespace sae::simd::detail
{
namespace
{

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n)
{
    const __m256d a = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256d y0 = _mm256_loadu_pd(y + i);
        __m256d y1 = _mm256_loadu_pd(y + i + 4);
        y0 = _mm256_fmadd_pd(a, _mm256_loadu_pd(x + i), y0);
        y1 = _mm256_fmadd_pd(a, _mm256_loadu_pd(x + i + 4), y1);
        _mm256_storeu_pd(y + i, y0);
        _mm256_storeu_pd(y + i + 4, y1);
    }
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(a, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    }
    for (; i < n; ++i) {
        y[i] += alpha * x[i];
    }
}

void affine_avx2(const double* phi, double keep, double shift, double* out, std::size_t n)
{
    const __m256d k = _mm256_set1_pd(keep);
    const __m256d s = _mm256_set1_pd(shift);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(out + i, _mm256_fmadd_pd(k, _mm256_loadu_pd(phi + i), s));
    }
    for (; i < n; ++i) {
        out[i] = keep * phi[i] + shift;
    }
}

double sum_avx2(const double* x, std::size_t n)
{
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
        acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(x + i + 4));
    }
    for (; i + 4 <= n; i += 4) {
        acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
    }
    acc0 = _mm256_add_pd(acc0, acc1);
    const __m128d lo = _mm256_castpd256_pd128(acc0);
    const __m128d hi = _mm256_extractf128_pd(acc0, 1);
    __m128d pair = _mm_add_pd(lo, hi);
    pair = _mm_add_sd(pair, _mm_unpackhi_pd(pair, pair));
    double total = _mm_cvtsd_f64(pair);
    for (; i < n; ++i) {
        total += x[i];
    }
    return total;
}

} // namespace

const KernelTable avx2_kernels{axpy_avx2, affine_avx2, sum_avx2};

} // namespace sae::simd::detail
