#include "kernel_table.hpp"

// AVX2 kernel variants. This TU is compiled with -mavx2 (and deliberately
// without -mfma): the element-wise kernels replicate the scalar expressions
// operation-for-operation, so their results are bit-identical to the scalar
// reference. Reductions accumulate in four lanes and combine pairwise.

#if defined(__AVX2__)

#include <immintrin.h>

namespace fibrelax::simd::detail {
namespace {

double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    __m128d s2 = _mm_add_pd(lo, hi);
    __m128d s1 = _mm_add_sd(s2, _mm_unpackhi_pd(s2, s2));
    return _mm_cvtsd_f64(s1);
}

constexpr std::size_t kBlock = 1024; // elements per partial before pairwise combine

double sum_block(const double* x, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
        acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(x + i + 4));
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += x[i];
    return s;
}

double dot_block(const double* x, const double* y, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
        acc1 = _mm256_add_pd(acc1,
                             _mm256_mul_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4)));
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += x[i] * y[i];
    return s;
}

double reduce_sum_avx2(const double* x, std::size_t n) {
    if (n <= kBlock) return sum_block(x, n);
    const std::size_t h = (n / 2 + 3) & ~std::size_t{3};
    return reduce_sum_avx2(x, h) + reduce_sum_avx2(x + h, n - h);
}

double reduce_dot_avx2(const double* x, const double* y, std::size_t n) {
    if (n <= kBlock) return dot_block(x, y, n);
    const std::size_t h = (n / 2 + 3) & ~std::size_t{3};
    return reduce_dot_avx2(x, y, h) + reduce_dot_avx2(x + h, y + h, n - h);
}

void axpy2_avx2(double* y, double a, const double* u, double b, const double* v, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    const __m256d vb = _mm256_set1_pd(b);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d t = _mm256_add_pd(_mm256_mul_pd(va, _mm256_loadu_pd(u + i)),
                                  _mm256_mul_pd(vb, _mm256_loadu_pd(v + i)));
        _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), t));
    }
    for (; i < n; ++i) y[i] += a * u[i] + b * v[i];
}

void upwind_diffusion_flux_avx2(double* flux, const double* rho_l, const double* rho_r,
                                const double* vel, double d_over_h, std::size_t n) {
    const __m256d zero = _mm256_setzero_pd();
    const __m256d doh = _mm256_set1_pd(d_over_h);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d v = _mm256_loadu_pd(vel + i);
        const __m256d l = _mm256_loadu_pd(rho_l + i);
        const __m256d r = _mm256_loadu_pd(rho_r + i);
        const __m256d vp = _mm256_max_pd(v, zero);
        const __m256d vm = _mm256_min_pd(v, zero);
        __m256d f = _mm256_add_pd(_mm256_mul_pd(vm, l), _mm256_mul_pd(vp, r));
        f = _mm256_add_pd(f, _mm256_mul_pd(doh, _mm256_sub_pd(r, l)));
        _mm256_storeu_pd(flux + i, f);
    }
    for (; i < n; ++i) {
        const double vp = vel[i] > 0.0 ? vel[i] : 0.0;
        const double vm = vel[i] < 0.0 ? vel[i] : 0.0;
        flux[i] = vm * rho_l[i] + vp * rho_r[i] + d_over_h * (rho_r[i] - rho_l[i]);
    }
}

void flux_divergence_update_avx2(double* rho, const double* fe, const double* fw,
                                 const double* fn, const double* fs, double scale,
                                 std::size_t n) {
    const __m256d sc = _mm256_set1_pd(scale);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d div = _mm256_add_pd(
            _mm256_sub_pd(_mm256_loadu_pd(fe + i), _mm256_loadu_pd(fw + i)),
            _mm256_sub_pd(_mm256_loadu_pd(fn + i), _mm256_loadu_pd(fs + i)));
        _mm256_storeu_pd(rho + i,
                         _mm256_add_pd(_mm256_loadu_pd(rho + i), _mm256_mul_pd(sc, div)));
    }
    for (; i < n; ++i) rho[i] += scale * ((fe[i] - fw[i]) + (fn[i] - fs[i]));
}

} // namespace

const KernelTable* avx2_table() {
    static const KernelTable t = {
        reduce_sum_avx2,     reduce_dot_avx2,           axpy2_avx2,
        upwind_diffusion_flux_avx2, flux_divergence_update_avx2, "avx2",
    };
    return &t;
}

} // namespace fibrelax::simd::detail

#else

namespace fibrelax::simd::detail {
const KernelTable* avx2_table() {
    return nullptr;
}
} // namespace fibrelax::simd::detail

#endif
