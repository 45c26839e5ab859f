#include "hvib/kernels.hpp"

#if defined(HVIB_HAVE_AVX2)

#include <immintrin.h>

namespace hvib::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sw = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sw));
}

}  // namespace

void gemm(std::size_t m, std::size_t n, std::size_t k, const double* a,
          const double* b, double* c) {
  const std::size_t n8 = n & ~std::size_t{7};
  const std::size_t n4 = n & ~std::size_t{3};
  for (std::size_t i = 0; i < m; ++i) {
    const double* ai = a + i * k;
    double* ci = c + i * n;
    std::size_t j = 0;
    for (; j < n8; j += 8) {
      __m256d acc0 = _mm256_setzero_pd();
      __m256d acc1 = _mm256_setzero_pd();
      for (std::size_t p = 0; p < k; ++p) {
        const __m256d s = _mm256_broadcast_sd(ai + p);
        const double* bp = b + p * n + j;
        acc0 = _mm256_fmadd_pd(s, _mm256_loadu_pd(bp), acc0);
        acc1 = _mm256_fmadd_pd(s, _mm256_loadu_pd(bp + 4), acc1);
      }
      _mm256_storeu_pd(ci + j, acc0);
      _mm256_storeu_pd(ci + j + 4, acc1);
    }
    for (; j < n4; j += 4) {
      __m256d acc = _mm256_setzero_pd();
      for (std::size_t p = 0; p < k; ++p) {
        acc = _mm256_fmadd_pd(_mm256_broadcast_sd(ai + p),
                              _mm256_loadu_pd(b + p * n + j), acc);
      }
      _mm256_storeu_pd(ci + j, acc);
    }
    for (; j < n; ++j) {
      double s = 0.0;
      for (std::size_t p = 0; p < k; ++p) s += ai[p] * b[p * n + j];
      ci[j] = s;
    }
  }
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(
        y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

double dot(const double* x, const double* y, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4),
                           _mm256_loadu_pd(y + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpby(double alpha, const double* x, double beta, double* y,
           std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  const __m256d vb = _mm256_set1_pd(beta);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d by = _mm256_mul_pd(vb, _mm256_loadu_pd(y + i));
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), by));
  }
  for (; i < n; ++i) y[i] = alpha * x[i] + beta * y[i];
}

}  // namespace hvib::kernels::avx2

#else

// Not compiled for this target; available(Backend::avx2) reports false and
// these are never dispatched to.
namespace hvib::kernels::avx2 {
void gemm(std::size_t m, std::size_t n, std::size_t k, const double* a,
          const double* b, double* c) {
  scalar::gemm(m, n, k, a, b, c);
}
void axpy(double alpha, const double* x, double* y, std::size_t n) {
  scalar::axpy(alpha, x, y, n);
}
double dot(const double* x, const double* y, std::size_t n) {
  return scalar::dot(x, y, n);
}
void axpby(double alpha, const double* x, double beta, double* y,
           std::size_t n) {
  scalar::axpby(alpha, x, beta, y, n);
}
}  // namespace hvib::kernels::avx2

#endif
