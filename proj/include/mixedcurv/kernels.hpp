#pragma once

#include <cstddef>

// Dense inner-loop kernels. Scalar reference implementations live in
// kernels.cpp; AVX2 variants in kernels_avx2.cpp. The active set is chosen
// once at startup from CPU features (scalar forced by MIXEDCURV_FORCE_SCALAR=1).
// Both variants are equivalence-tested against each other in tests/.

namespace mixedcurv::kernels {

struct Ops {
  // sum_i a[i]*b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // sum_i s[i]*a[i]*b[i]  (signature-weighted contraction)
  double (*dot_sign)(const double* a, const double* b, const double* s, std::size_t n);
  // y[i] += alpha*x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // out[i] = sum_j m[i*n+j]*v[j], i < rows
  void (*gemv)(const double* m, const double* v, double* out, std::size_t rows, std::size_t n);
};

const Ops& ops();

const Ops& scalar_ops();
#ifdef MIXEDCURV_BUILD_AVX2
const Ops& avx2_ops();
#endif

bool using_simd();
const char* active_name();

inline double dot(const double* a, const double* b, std::size_t n) { return ops().dot(a, b, n); }
inline double dot_sign(const double* a, const double* b, const double* s, std::size_t n) {
  return ops().dot_sign(a, b, s, n);
}
inline void axpy(double alpha, const double* x, double* y, std::size_t n) { ops().axpy(alpha, x, y, n); }
inline void gemv(const double* m, const double* v, double* out, std::size_t rows, std::size_t n) {
  ops().gemv(m, v, out, rows, n);
}

}  // namespace mixedcurv::kernels
