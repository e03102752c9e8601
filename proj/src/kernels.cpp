#include "mixedcurv/kernels.hpp"

#include <cstdlib>

namespace mixedcurv::kernels {

namespace detail {
#ifdef MIXEDCURV_BUILD_AVX2
const Ops& avx2_ops_impl();  // defined in kernels_avx2.cpp
#endif
}  // namespace detail

namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double dot_sign_scalar(const double* a, const double* b, const double* s, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += s[i] * a[i] * b[i];
  return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void gemv_scalar(const double* m, const double* v, double* out, std::size_t rows, std::size_t n) {
  for (std::size_t i = 0; i < rows; ++i) {
    double acc = 0.0;
    const double* row = m + i * n;
    for (std::size_t j = 0; j < n; ++j) acc += row[j] * v[j];
    out[i] = acc;
  }
}

const Ops kScalar{dot_scalar, dot_sign_scalar, axpy_scalar, gemv_scalar};

const Ops* select() {
  const char* force = std::getenv("MIXEDCURV_FORCE_SCALAR");
  if (force && force[0] == '1') return &kScalar;
#ifdef MIXEDCURV_BUILD_AVX2
  if (__builtin_cpu_supports("avx2")) return &detail::avx2_ops_impl();
#endif
  return &kScalar;
}

}  // namespace

const Ops& scalar_ops() { return kScalar; }

#ifdef MIXEDCURV_BUILD_AVX2
const Ops& avx2_ops() { return detail::avx2_ops_impl(); }
#endif

const Ops& ops() {
  static const Ops* active = select();
  return *active;
}

bool using_simd() { return &ops() != &kScalar; }

const char* active_name() { return using_simd() ? "avx2" : "scalar"; }

}  // namespace mixedcurv::kernels
