#include "mixedcurv/geometry.hpp"

#include <cmath>

#include "mixedcurv/errors.hpp"
#include "mixedcurv/linalg.hpp"

namespace mixedcurv {

void Chart::wrap(double* x) const {
  for (int i = 0; i < n; ++i) {
    if (!periodic[static_cast<std::size_t>(i)]) continue;
    double l = lo[static_cast<std::size_t>(i)], e = extent(i);
    double v = x[i];
    if (v < l || v >= l + e) {
      v = std::fmod(v - l, e);
      if (v < 0) v += e;
      x[i] = l + v;
    }
  }
}

bool Chart::interior(const double* x, double margin_steps) const {
  for (int i = 0; i < n; ++i) {
    if (periodic[static_cast<std::size_t>(i)]) continue;
    double m = margin_steps * step(i);
    if (x[i] < lo[static_cast<std::size_t>(i)] + m || x[i] > hi[static_cast<std::size_t>(i)] - m) return false;
  }
  return true;
}

namespace geometry {

namespace {

void eval_metric(const Chart& chart, const double* x, double* g) {
  std::vector<double> xc(x, x + chart.n);
  chart.wrap(xc.data());
  chart.metric_fn(xc.data(), g);
}

// central difference of f (len outputs) along one axis, step h
void central_diff(const std::function<void(const double*, double*)>& f, int len, const double* x,
                  int axis, double h, int n, double* out) {
  std::vector<double> xp(x, x + n), xm(x, x + n);
  xp[static_cast<std::size_t>(axis)] += h;
  xm[static_cast<std::size_t>(axis)] -= h;
  std::vector<double> fp(static_cast<std::size_t>(len)), fm(static_cast<std::size_t>(len));
  f(xp.data(), fp.data());
  f(xm.data(), fm.data());
  double inv = 1.0 / (2.0 * h);
  for (int i = 0; i < len; ++i) out[i] = (fp[static_cast<std::size_t>(i)] - fm[static_cast<std::size_t>(i)]) * inv;
}

}  // namespace

std::vector<double> partials(const std::function<void(const double*, double*)>& f, int len,
                             const Chart& chart, const double* x) {
  const int n = chart.n;
  std::vector<double> out(static_cast<std::size_t>(n) * len);
  std::vector<double> d1(static_cast<std::size_t>(len)), d2(static_cast<std::size_t>(len));
  for (int i = 0; i < n; ++i) {
    double h = chart.step(i);
    if (!chart.fd.richardson) {
      central_diff(f, len, x, i, h, n, &out[static_cast<std::size_t>(i) * len]);
      continue;
    }
    central_diff(f, len, x, i, h, n, d1.data());
    central_diff(f, len, x, i, 0.5 * h, n, d2.data());
    double scale = 0.0;
    double diff = 0.0;
    for (int j = 0; j < len; ++j) {
      out[static_cast<std::size_t>(i) * len + j] =
          (4.0 * d2[static_cast<std::size_t>(j)] - d1[static_cast<std::size_t>(j)]) / 3.0;
      scale = std::max(scale, std::fabs(d2[static_cast<std::size_t>(j)]));
      diff = std::max(diff, std::fabs(d2[static_cast<std::size_t>(j)] - d1[static_cast<std::size_t>(j)]));
    }
    if (diff > chart.fd.instab_tol * std::max(scale, 1.0)) {
      throw NumericalInstability("finite differences disagree under step refinement (axis " +
                                 std::to_string(i) + ")");
    }
  }
  return out;
}

std::vector<double> metric_at(const Chart& chart, const double* x) {
  std::vector<double> g(static_cast<std::size_t>(chart.n) * chart.n);
  eval_metric(chart, x, g.data());
  return g;
}

std::vector<double> metric_inverse_at(const Chart& chart, const double* x) {
  std::vector<double> g = metric_at(chart, x);
  return linalg::inverse(g, chart.n, 1e-10);
}

double metric_det_at(const Chart& chart, const double* x) {
  std::vector<double> g = metric_at(chart, x);
  return linalg::det(g, chart.n);
}

Nd christoffel_at(const Chart& chart, const double* x) {
  const int n = chart.n;
  std::vector<double> g = metric_at(chart, x);
  std::vector<double> ginv = linalg::inverse(g, n, 1e-10);

  auto mfn = [&chart](const double* p, double* out) { eval_metric(chart, p, out); };
  std::vector<double> dg = partials(mfn, n * n, chart, x);  // dg[i*(n*n) + j*n + k] = d_i g_jk

  Nd gamma({n, n, n});  // at(i,j,k) = Gamma^k_ij
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        double acc = 0.0;
        for (int m = 0; m < n; ++m) {
          double t = dg[static_cast<std::size_t>(i) * n * n + static_cast<std::size_t>(j) * n + m] +
                     dg[static_cast<std::size_t>(j) * n * n + static_cast<std::size_t>(i) * n + m] -
                     dg[static_cast<std::size_t>(m) * n * n + static_cast<std::size_t>(i) * n + j];
          acc += ginv[static_cast<std::size_t>(k) * n + m] * t;
        }
        gamma.at(i, j, k) = 0.5 * acc;
      }
    }
  }
  return gamma;
}

Nd riemann_at(const Chart& chart, const double* x) {
  const int n = chart.n;
  Nd gamma = christoffel_at(chart, x);

  // The outer differentiation works on quantities that already carry the
  // rounding noise of the inner metric stencils, so it runs at a larger step;
  // Richardson keeps the truncation error far below the noise floor.
  Chart outer = chart;
  outer.fd.step_rel = chart.fd.step_rel * 8.0;
  auto gfn = [&chart](const double* p, double* out) {
    Nd g = christoffel_at(chart, p);
    for (std::size_t i = 0; i < g.size(); ++i) out[i] = g[i];
  };
  std::vector<double> dgamma = partials(gfn, n * n * n, outer, x);
  auto dG = [&](int i, int j, int k, int l) {
    // d_i Gamma^l_jk
    return dgamma[static_cast<std::size_t>(i) * n * n * n + (static_cast<std::size_t>(j) * n + k) * n + l];
  };

  Nd r({n, n, n, n});  // at(i,j,k,l) = R^l_ijk
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l) {
          double acc = dG(j, i, k, l) - dG(i, j, k, l);
          for (int m = 0; m < n; ++m) {
            acc += gamma.at(i, k, m) * gamma.at(j, m, l) - gamma.at(j, k, m) * gamma.at(i, m, l);
          }
          r.at(i, j, k, l) = acc;
        }
      }
    }
  }
  return r;
}

Nd ricci_at(const Chart& chart, const double* x) {
  const int n = chart.n;
  Nd r = riemann_at(chart, x);
  std::vector<double> g = metric_at(chart, x);
  std::vector<double> ginv = linalg::inverse(g, n, 1e-10);
  Nd ric({n, n});
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      double acc = 0.0;
      for (int a = 0; a < n; ++a)
        for (int c = 0; c < n; ++c)
          for (int l = 0; l < n; ++l)
            acc += ginv[static_cast<std::size_t>(a) * n + c] * r.at(a, j, c, l) * g[static_cast<std::size_t>(l) * n + k];
      ric.at(j, k) = acc;
    }
  }
  return ric;
}

double scalar_at(const Chart& chart, const double* x) {
  const int n = chart.n;
  Nd ric = ricci_at(chart, x);
  std::vector<double> ginv = metric_inverse_at(chart, x);
  double s = 0.0;
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) s += ginv[static_cast<std::size_t>(j) * n + k] * ric.at(j, k);
  return s;
}

Nd covariant_derivative_vector(const VectorFieldFn& field, const Chart& chart, const double* x) {
  const int n = chart.n;
  auto f = [&](const double* p, double* out) {
    std::vector<double> xc(p, p + n);
    chart.wrap(xc.data());
    field(xc.data(), out);
  };
  std::vector<double> dX = partials(f, n, chart, x);  // dX[i*n + l] = d_i X^l
  Nd gamma = christoffel_at(chart, x);
  std::vector<double> Xv(static_cast<std::size_t>(n));
  f(x, Xv.data());
  Nd out({n, n});  // at(i,l) = (nabla_i X)^l
  for (int i = 0; i < n; ++i)
    for (int l = 0; l < n; ++l) {
      double acc = dX[static_cast<std::size_t>(i) * n + l];
      for (int m = 0; m < n; ++m) acc += gamma.at(i, m, l) * Xv[static_cast<std::size_t>(m)];
      out.at(i, l) = acc;
    }
  return out;
}

double divergence_at(const VectorFieldFn& field, const Chart& chart, const double* x) {
  Nd grad = covariant_derivative_vector(field, chart, x);
  double acc = 0.0;
  for (int i = 0; i < chart.n; ++i) acc += grad.at(i, i);
  return acc;
}

Nd covariant_derivative_tensor(const TensorFieldFn& field, int s, const Chart& chart, const double* x) {
  const int n = chart.n;
  std::size_t len = 1;
  for (int i = 0; i < s + 1; ++i) len *= static_cast<std::size_t>(n);

  std::vector<int> shape(static_cast<std::size_t>(s + 1), n);
  auto f = [&](const double* p, double* out) {
    std::vector<double> xc(p, p + n);
    chart.wrap(xc.data());
    Nd t(shape);
    field(xc.data(), t);
    for (std::size_t i = 0; i < len; ++i) out[i] = t[i];
  };
  std::vector<double> dT = partials(f, static_cast<int>(len), chart, x);
  Nd tv(shape);
  {
    std::vector<double> tmp(len);
    f(x, tmp.data());
    for (std::size_t i = 0; i < len; ++i) tv[i] = tmp[i];
  }
  Nd gamma = christoffel_at(chart, x);

  std::vector<int> oshape(static_cast<std::size_t>(s + 2), n);
  Nd out(oshape);

  // flat iteration over (j1..js, l)
  std::vector<int> idx(static_cast<std::size_t>(s + 1), 0);
  for (std::size_t flat = 0; flat < len; ++flat) {
    std::size_t rest = flat;
    for (int k = s; k >= 0; --k) {
      idx[static_cast<std::size_t>(k)] = static_cast<int>(rest % static_cast<std::size_t>(n));
      rest /= static_cast<std::size_t>(n);
    }
    int l = idx[static_cast<std::size_t>(s)];
    for (int i = 0; i < n; ++i) {
      double acc = dT[static_cast<std::size_t>(i) * len + flat];
      // + Gamma^l_im T^m_{j...}
      for (int m = 0; m < n; ++m) {
        std::size_t fm = 0;
        for (int k = 0; k < s; ++k) fm = fm * static_cast<std::size_t>(n) + static_cast<std::size_t>(idx[static_cast<std::size_t>(k)]);
        fm = fm * static_cast<std::size_t>(n) + static_cast<std::size_t>(m);
        acc += gamma.at(i, m, l) * tv[fm];
      }
      // - Gamma^m_{i j_t} T^l_{.. m ..}
      for (int t = 0; t < s; ++t) {
        for (int m = 0; m < n; ++m) {
          std::size_t fm = 0;
          for (int k = 0; k < s; ++k) {
            int jk = (k == t) ? m : idx[static_cast<std::size_t>(k)];
            fm = fm * static_cast<std::size_t>(n) + static_cast<std::size_t>(jk);
          }
          fm = fm * static_cast<std::size_t>(n) + static_cast<std::size_t>(l);
          acc -= gamma.at(i, idx[static_cast<std::size_t>(t)], m) * tv[fm];
        }
      }
      // out index = (i, j1..js, l)
      std::size_t of = static_cast<std::size_t>(i);
      for (int k = 0; k < s + 1; ++k) of = of * static_cast<std::size_t>(n) + static_cast<std::size_t>(idx[static_cast<std::size_t>(k)]);
      out[of] = acc;
    }
  }
  return out;
}

Nd divergence_tensor_at(const TensorFieldFn& field, int s, const Chart& chart, const double* x) {
  const int n = chart.n;
  Nd grad = covariant_derivative_tensor(field, s, chart, x);  // (i, j1..js, l)
  std::vector<int> oshape(static_cast<std::size_t>(std::max(s, 1)), n);
  if (s == 0) {
    Nd out({1});
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += grad.at(i, i);
    out[0] = acc;
    return out;
  }
  Nd out(oshape);
  std::size_t mid = 1;
  for (int k = 0; k < s; ++k) mid *= static_cast<std::size_t>(n);
  for (std::size_t j = 0; j < mid; ++j) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      std::size_t f = (static_cast<std::size_t>(i) * mid + j) * static_cast<std::size_t>(n) + static_cast<std::size_t>(i);
      acc += grad[f];
    }
    out[j] = acc;
  }
  return out;
}

}  // namespace geometry
}  // namespace mixedcurv
