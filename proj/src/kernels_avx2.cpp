#include "mixedcurv/kernels.hpp"

#include <immintrin.h>

namespace mixedcurv::kernels {
namespace detail {

namespace {

inline double hsum256(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
  }
  double tail = 0.0;
  for (; i < n; ++i) tail += a[i] * b[i];
  return hsum256(acc) + tail;
}

double dot_sign_avx2(const double* a, const double* b, const double* s, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d ab = _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(s + i), ab, acc);
  }
  double tail = 0.0;
  for (; i < n; ++i) tail += s[i] * a[i] * b[i];
  return hsum256(acc) + tail;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void gemv_avx2(const double* m, const double* v, double* out, std::size_t rows, std::size_t n) {
  for (std::size_t r = 0; r < rows; ++r) out[r] = dot_avx2(m + r * n, v, n);
}

const Ops kAvx2{dot_avx2, dot_sign_avx2, axpy_avx2, gemv_avx2};

}  // namespace

const Ops& avx2_ops_impl() { return kAvx2; }

}  // namespace detail
}  // namespace mixedcurv::kernels
