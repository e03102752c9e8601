#include "mixedcurv/core_tensor.hpp"

#include <cmath>

#include "mixedcurv/kernels.hpp"
#include "mixedcurv/linalg.hpp"

namespace mixedcurv::core_tensor {

namespace {

void require_rank_one(const TensorValue& t, int cov, int contra) {
  if (t.cov != cov || t.contra != contra) throw ShapeError("expected rank-one tensor of matching variance");
}

}  // namespace

TensorValue flat(const TensorValue& v, const std::vector<double>& g, const Signature& sig) {
  require_rank_one(v, 0, 1);
  if (sig.n() != v.n) throw ShapeError("signature dimension mismatch");
  if (!is_symmetric2(g, v.n, 1e-10)) throw DegenerateMetric("metric not symmetric");
  double d = linalg::det(g, v.n);
  if (std::fabs(d) < 1e-12) throw DegenerateMetric("metric singular in flat()");
  TensorValue out(1, 0, v.n, v.frame_tag);
  kernels::gemv(g.data(), v.comps.data(), out.comps.data(), static_cast<std::size_t>(v.n),
                static_cast<std::size_t>(v.n));
  return out;
}

TensorValue sharp(const TensorValue& omega, const std::vector<double>& g, const Signature& sig) {
  require_rank_one(omega, 1, 0);
  if (sig.n() != omega.n) throw ShapeError("signature dimension mismatch");
  std::vector<double> ginv = linalg::inverse(g, omega.n);
  TensorValue out(0, 1, omega.n, omega.frame_tag);
  kernels::gemv(ginv.data(), omega.comps.data(), out.comps.data(), static_cast<std::size_t>(omega.n),
                static_cast<std::size_t>(omega.n));
  return out;
}

TensorValue flat(const TensorValue& v, const Signature& sig) {
  require_rank_one(v, 0, 1);
  TensorValue out(1, 0, v.n, v.frame_tag);
  for (int i = 0; i < v.n; ++i) out.comps.at(i) = sig.eps[static_cast<std::size_t>(i)] * v.comps.at(i);
  return out;
}

TensorValue sharp(const TensorValue& omega, const Signature& sig) {
  require_rank_one(omega, 1, 0);
  TensorValue out(0, 1, omega.n, omega.frame_tag);
  for (int i = 0; i < omega.n; ++i) out.comps.at(i) = sig.eps[static_cast<std::size_t>(i)] * omega.comps.at(i);
  return out;
}

double inner(const TensorValue& t1, const TensorValue& t2, const Signature& sig) {
  t1.require_same_shape(t2);
  t1.require_same_frame(t2);
  if (sig.n() != t1.n) throw ShapeError("signature dimension mismatch");
  const int r = t1.rank();
  const int n = t1.n;
  const std::size_t total = t1.comps.size();

  if (r == 0) return t1.comps[0] * t2.comps[0];

  // weight of a flat index = product of eps over its digits
  double acc = 0.0;
  std::vector<int> idx(static_cast<std::size_t>(r), 0);
  for (std::size_t flat = 0; flat < total; ++flat) {
    double w = 1.0;
    std::size_t rest = flat;
    for (int k = r - 1; k >= 0; --k) {
      int d = static_cast<int>(rest % static_cast<std::size_t>(n));
      rest /= static_cast<std::size_t>(n);
      w *= sig.eps[static_cast<std::size_t>(d)];
    }
    acc += w * t1.comps[flat] * t2.comps[flat];
  }
  return acc;
}

TensorValue upsilon(const TensorValue& p, const TensorValue& p2, const Signature& sig) {
  if (p.cov != 2 || p.contra != 1 || p2.cov != 2 || p2.contra != 1) throw ShapeError("upsilon expects (1,2) tensors");
  p.require_same_frame(p2);
  if (p.n != p2.n || sig.n() != p.n) throw ShapeError("upsilon dimension mismatch");
  const int n = p.n;
  TensorValue out(2, 0, n, p.frame_tag);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int lam = 0; lam < n; ++lam) {
        double el = sig.eps[static_cast<std::size_t>(lam)];
        for (int mu = 0; mu < n; ++mu) {
          double w = el * sig.eps[static_cast<std::size_t>(mu)];
          acc += w * (p.comps.at(lam, mu, i) * p2.comps.at(lam, mu, j) +
                      p2.comps.at(lam, mu, i) * p.comps.at(lam, mu, j));
        }
      }
      out.comps.at(i, j) = sig.eps[static_cast<std::size_t>(i)] * sig.eps[static_cast<std::size_t>(j)] * acc;
    }
  }
  return out;
}

double max_abs(const TensorValue& t) {
  double m = 0.0;
  for (std::size_t i = 0; i < t.comps.size(); ++i) m = std::max(m, std::fabs(t.comps[i]));
  return m;
}

TensorValue sym2(const TensorValue& t) {
  if (t.cov != 2 || t.contra != 0) throw ShapeError("sym2 expects (0,2)");
  TensorValue out = t;
  for (int i = 0; i < t.n; ++i)
    for (int j = 0; j < t.n; ++j) out.comps.at(i, j) = 0.5 * (t.comps.at(i, j) + t.comps.at(j, i));
  return out;
}

bool is_symmetric2(const std::vector<double>& g, int n, double tol) {
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::fabs(g[static_cast<std::size_t>(i) * n + j] - g[static_cast<std::size_t>(j) * n + i]) > tol) return false;
  return true;
}

}  // namespace mixedcurv::core_tensor
