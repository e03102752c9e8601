#include "mixedcurv/linalg.hpp"

#include <cmath>
#include <cstdlib>

#include "mixedcurv/errors.hpp"

namespace mixedcurv::linalg {

namespace {

// In-place LU with partial pivoting; returns determinant, leaves factors in a.
double lu_factor(std::vector<double>& a, int n, std::vector<int>& piv) {
  piv.resize(static_cast<std::size_t>(n));
  double d = 1.0;
  for (int k = 0; k < n; ++k) {
    int p = k;
    double best = std::fabs(a[static_cast<std::size_t>(k) * n + k]);
    for (int i = k + 1; i < n; ++i) {
      double v = std::fabs(a[static_cast<std::size_t>(i) * n + k]);
      if (v > best) {
        best = v;
        p = i;
      }
    }
    piv[static_cast<std::size_t>(k)] = p;
    if (p != k) {
      for (int j = 0; j < n; ++j) std::swap(a[static_cast<std::size_t>(k) * n + j], a[static_cast<std::size_t>(p) * n + j]);
      d = -d;
    }
    double pivv = a[static_cast<std::size_t>(k) * n + k];
    d *= pivv;
    if (pivv == 0.0) return 0.0;
    for (int i = k + 1; i < n; ++i) {
      double f = a[static_cast<std::size_t>(i) * n + k] / pivv;
      a[static_cast<std::size_t>(i) * n + k] = f;
      for (int j = k + 1; j < n; ++j) a[static_cast<std::size_t>(i) * n + j] -= f * a[static_cast<std::size_t>(k) * n + j];
    }
  }
  return d;
}

void lu_solve(const std::vector<double>& lu, const std::vector<int>& piv, int n, double* x) {
  for (int k = 0; k < n; ++k) {
    if (piv[static_cast<std::size_t>(k)] != k) std::swap(x[k], x[piv[static_cast<std::size_t>(k)]]);
  }
  for (int i = 1; i < n; ++i) {
    double s = x[i];
    for (int j = 0; j < i; ++j) s -= lu[static_cast<std::size_t>(i) * n + j] * x[j];
    x[i] = s;
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = x[i];
    for (int j = i + 1; j < n; ++j) s -= lu[static_cast<std::size_t>(i) * n + j] * x[j];
    x[i] = s / lu[static_cast<std::size_t>(i) * n + i];
  }
}

}  // namespace

double det(std::vector<double> a, int n) {
  std::vector<int> piv;
  return lu_factor(a, n, piv);
}

std::vector<double> inverse(const std::vector<double>& a, int n, double tol) {
  std::vector<double> lu = a;
  std::vector<int> piv;
  double d = lu_factor(lu, n, piv);
  if (std::fabs(d) < tol) throw DegenerateMetric("matrix (near-)singular, |det| = " + std::to_string(std::fabs(d)));
  std::vector<double> inv(static_cast<std::size_t>(n) * n, 0.0);
  std::vector<double> col(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) col[static_cast<std::size_t>(i)] = (i == j) ? 1.0 : 0.0;
    lu_solve(lu, piv, n, col.data());
    for (int i = 0; i < n; ++i) inv[static_cast<std::size_t>(i) * n + j] = col[static_cast<std::size_t>(i)];
  }
  return inv;
}

void sym_eigen(const std::vector<double>& a_in, int n, std::vector<double>& w, std::vector<double>& v) {
  std::vector<double> a = a_in;
  v.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i) * n + i] = 1.0;

  auto A = [&](int i, int j) -> double& { return a[static_cast<std::size_t>(i) * n + j]; };
  auto V = [&](int i, int j) -> double& { return v[static_cast<std::size_t>(i) * n + j]; };

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += A(p, q) * A(p, q);
    if (off < 1e-30) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        double apq = A(p, q);
        if (std::fabs(apq) < 1e-300) continue;
        double theta = (A(q, q) - A(p, p)) / (2.0 * apq);
        double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        for (int k = 0; k < n; ++k) {
          double akp = A(k, p), akq = A(k, q);
          A(k, p) = c * akp - s * akq;
          A(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          double apk = A(p, k), aqk = A(q, k);
          A(p, k) = c * apk - s * aqk;
          A(q, k) = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          double vkp = V(k, p), vkq = V(k, q);
          V(k, p) = c * vkp - s * vkq;
          V(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  w.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) w[static_cast<std::size_t>(i)] = A(i, i);
  // sort ascending (stable selection keeps determinism)
  for (int i = 0; i < n; ++i) {
    int m = i;
    for (int j = i + 1; j < n; ++j)
      if (w[static_cast<std::size_t>(j)] < w[static_cast<std::size_t>(m)]) m = j;
    if (m != i) {
      std::swap(w[static_cast<std::size_t>(i)], w[static_cast<std::size_t>(m)]);
      for (int k = 0; k < n; ++k) std::swap(V(k, i), V(k, m));
    }
  }
}

std::vector<double> lstsq(const std::vector<double>& a, const std::vector<double>& b, int m, int n,
                          double rank_tol, double* residual_norm) {
  // normal equations: (A^T A) x = A^T b, pseudo-inverted through eigen pairs
  std::vector<double> ata(static_cast<std::size_t>(n) * n, 0.0);
  std::vector<double> atb(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < m; ++i) {
    const double* row = &a[static_cast<std::size_t>(i) * n];
    for (int p = 0; p < n; ++p) {
      atb[static_cast<std::size_t>(p)] += row[p] * b[static_cast<std::size_t>(i)];
      for (int q = p; q < n; ++q) ata[static_cast<std::size_t>(p) * n + q] += row[p] * row[q];
    }
  }
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < p; ++q) ata[static_cast<std::size_t>(p) * n + q] = ata[static_cast<std::size_t>(q) * n + p];

  std::vector<double> w, v;
  sym_eigen(ata, n, w, v);
  double wmax = 0.0;
  for (double x : w) wmax = std::max(wmax, std::fabs(x));
  double thresh = wmax * rank_tol;

  std::vector<double> x(static_cast<std::size_t>(n), 0.0);
  for (int j = 0; j < n; ++j) {
    double wj = w[static_cast<std::size_t>(j)];
    if (std::fabs(wj) <= thresh) continue;
    double c = 0.0;
    for (int i = 0; i < n; ++i) c += v[static_cast<std::size_t>(i) * n + j] * atb[static_cast<std::size_t>(i)];
    c /= wj;
    for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] += c * v[static_cast<std::size_t>(i) * n + j];
  }

  if (residual_norm) {
    double r2 = 0.0;
    for (int i = 0; i < m; ++i) {
      double ri = -b[static_cast<std::size_t>(i)];
      const double* row = &a[static_cast<std::size_t>(i) * n];
      for (int j = 0; j < n; ++j) ri += row[j] * x[static_cast<std::size_t>(j)];
      r2 += ri * ri;
    }
    *residual_norm = std::sqrt(r2);
  }
  return x;
}

std::vector<std::vector<double>> nullspace(const std::vector<double>& a, int m, int n, double rank_tol) {
  std::vector<double> ata(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < m; ++i) {
    const double* row = &a[static_cast<std::size_t>(i) * n];
    for (int p = 0; p < n; ++p)
      for (int q = p; q < n; ++q) ata[static_cast<std::size_t>(p) * n + q] += row[p] * row[q];
  }
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < p; ++q) ata[static_cast<std::size_t>(p) * n + q] = ata[static_cast<std::size_t>(q) * n + p];

  std::vector<double> w, v;
  sym_eigen(ata, n, w, v);
  double wmax = 0.0;
  for (double x : w) wmax = std::max(wmax, std::fabs(x));
  // eigenvalues of A^T A are squared singular values
  double thresh = wmax * rank_tol * rank_tol;
  if (wmax == 0.0) thresh = -1.0;  // all-zero A: whole space is null

  std::vector<std::vector<double>> basis;
  for (int j = 0; j < n; ++j) {
    if (w[static_cast<std::size_t>(j)] <= thresh || wmax == 0.0) {
      std::vector<double> col(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) col[static_cast<std::size_t>(i)] = v[static_cast<std::size_t>(i) * n + j];
      basis.push_back(std::move(col));
    }
  }
  return basis;
}

}  // namespace mixedcurv::linalg
