// AVX2 + FMA variants. This file is compiled with -mavx2 -mfma and must only
// be entered after isa_available(Isa::avx2) has returned true.

#include <immintrin.h>

#include "mvar/kernels.hpp"

namespace mvar::kernels::avx2 {
namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d sh = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

double dot(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

double weighted_dot(const double* w, const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256d wa0 = _mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(a + i));
        __m256d wa1 = _mm256_mul_pd(_mm256_loadu_pd(w + i + 4), _mm256_loadu_pd(a + i + 4));
        acc0 = _mm256_fmadd_pd(wa0, _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(wa1, _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4) {
        __m256d wa = _mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(a + i));
        acc0 = _mm256_fmadd_pd(wa, _mm256_loadu_pd(b + i), acc0);
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += w[i] * a[i] * b[i];
    return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
        _mm256_storeu_pd(y + i, vy);
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

// Forward substitution for four residuals at once: lane l of z[i] holds
// coordinate i of residual t + l.
void mahalanobis_sq(const double* L, std::size_t m, const double* resid, std::size_t n,
                    double* out, double* scratch) {
    std::size_t t = 0;
    for (; t + 4 <= n; t += 4) {
        __m256d q = _mm256_setzero_pd();
        for (std::size_t i = 0; i < m; ++i) {
            __m256d v = _mm256_loadu_pd(resid + i * n + t);
            for (std::size_t j = 0; j < i; ++j) {
                __m256d lij = _mm256_set1_pd(L[j * m + i]);
                v = _mm256_fnmadd_pd(lij, _mm256_loadu_pd(scratch + 4 * j), v);
            }
            __m256d zi = _mm256_div_pd(v, _mm256_set1_pd(L[i * m + i]));
            _mm256_storeu_pd(scratch + 4 * i, zi);
            q = _mm256_fmadd_pd(zi, zi, q);
        }
        _mm256_storeu_pd(out + t, q);
    }
    for (; t < n; ++t) {
        double q = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            double v = resid[i * n + t];
            for (std::size_t j = 0; j < i; ++j) v -= L[j * m + i] * scratch[j];
            scratch[i] = v / L[i * m + i];
            q += scratch[i] * scratch[i];
        }
        out[t] = q;
    }
}

const KernelTable kTable{Isa::avx2, &dot, &weighted_dot, &axpy, &mahalanobis_sq};

}  // namespace

const KernelTable* table_impl() { return &kTable; }

}  // namespace mvar::kernels::avx2
