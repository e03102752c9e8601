#include "mixedcurv/functionals.hpp"

#include <cmath>

#include "mixedcurv/errors.hpp"
#include "mixedcurv/linalg.hpp"
#include "mixedcurv/threads.hpp"

namespace mixedcurv {

QuadratureGrid QuadratureGrid::standard(const Chart& chart, int periodic_nodes, int open_nodes) {
  QuadratureGrid g;
  for (int i = 0; i < chart.n; ++i) {
    if (chart.periodic[static_cast<std::size_t>(i)]) {
      g.nodes_per_axis.push_back(periodic_nodes);
    } else {
      g.nodes_per_axis.push_back(open_nodes | 1);  // Simpson needs odd
    }
  }
  return g;
}

namespace functionals {

namespace {

double frame_vec_inner(const FramePoint& fr, const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (int c = 0; c < fr.n; ++c) acc += fr.eps[static_cast<std::size_t>(c)] * a[static_cast<std::size_t>(c)] * b[static_cast<std::size_t>(c)];
  return acc;
}

// eps-weighted squared norm of a (n,n,n) value tensor restricted to arg blocks
double tensor_norm2(const FramePoint& fr, const Nd& t) {
  double acc = 0.0;
  for (int a = 0; a < fr.n; ++a)
    for (int b = 0; b < fr.n; ++b) {
      double w = fr.eps[static_cast<std::size_t>(a)] * fr.eps[static_cast<std::size_t>(b)];
      double v = 0.0;
      for (int c = 0; c < fr.n; ++c)
        v += fr.eps[static_cast<std::size_t>(c)] * t.at(a, b, c) * t.at(a, b, c);
      acc += w * v;
    }
  return acc;
}

}  // namespace

Nd curvature_with_contorsion_at(const Chart& chart, const AdaptedFrameField& frame, const double* x,
                                const ContorsionField* I) {
  const int n = chart.n;
  Nd r = geometry::riemann_at(chart, x);
  if (!I) return r;

  TensorFieldFn ifield = [&chart, &frame, I](const double* p, Nd& out) {
    FramePoint fr = frame.at(p);
    Nd ic = I->at(p, fr);
    out = contorsion::coord_components(ic, fr);
  };
  Nd dI = geometry::covariant_derivative_tensor(ifield, 2, chart, x);  // (i, j, k, l) = (nabla_i I)^l_jk
  FramePoint fr0 = frame.at(x);
  Nd ic0 = I->at(x, fr0);
  Nd icoord = contorsion::coord_components(ic0, fr0);

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double acc = dI.at(j, i, k, l) - dI.at(i, j, k, l);
          for (int m = 0; m < n; ++m)
            acc += icoord.at(j, m, l) * icoord.at(i, k, m) - icoord.at(i, m, l) * icoord.at(j, k, m);
          r.at(i, j, k, l) += acc;
        }
  return r;
}

Nd curvature_frame_components(const Nd& r_coord, const FramePoint& fr) {
  const int n = fr.n;
  // contract one slot at a time
  Nd t1({n, n, n, n});  // (a, j, k, l)
  for (int a = 0; a < n; ++a)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double acc = 0.0;
          for (int i = 0; i < n; ++i) acc += fr.E[static_cast<std::size_t>(a) * n + i] * r_coord.at(i, j, k, l);
          t1.at(a, j, k, l) = acc;
        }
  Nd t2({n, n, n, n});  // (a, b, k, l)
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double acc = 0.0;
          for (int j = 0; j < n; ++j) acc += fr.E[static_cast<std::size_t>(b) * n + j] * t1.at(a, j, k, l);
          t2.at(a, b, k, l) = acc;
        }
  Nd t3({n, n, n, n});  // (a, b, c, l)
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int l = 0; l < n; ++l) {
          double acc = 0.0;
          for (int k = 0; k < n; ++k) acc += fr.E[static_cast<std::size_t>(c) * n + k] * t2.at(a, b, k, l);
          t3.at(a, b, c, l) = acc;
        }
  // lower the value slot against E_d: <.., E_d> = (g E_d)_l
  Nd out({n, n, n, n});
  std::vector<double> gE(static_cast<std::size_t>(n) * n);
  for (int d = 0; d < n; ++d)
    for (int l = 0; l < n; ++l) {
      double acc = 0.0;
      for (int m = 0; m < n; ++m) acc += fr.g[static_cast<std::size_t>(l) * n + m] * fr.E[static_cast<std::size_t>(d) * n + m];
      gE[static_cast<std::size_t>(d) * n + l] = acc;
    }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          double acc = 0.0;
          for (int l = 0; l < n; ++l) acc += t3.at(a, b, c, l) * gE[static_cast<std::size_t>(d) * n + l];
          out.at(a, b, c, d) = acc;
        }
  return out;
}

double mixed_scalar_at(const Chart& chart, const AdaptedFrameField& frame, const double* x,
                       const ContorsionField* I) {
  FramePoint fr = frame.at(x);
  Nd rc = curvature_with_contorsion_at(chart, frame, x, I);
  Nd rf = curvature_frame_components(rc, fr);
  double acc = 0.0;
  for (int nu = 0; nu < fr.k; ++nu)
    for (int mu = nu + 1; mu < fr.k; ++mu)
      for (int a = 0; a < fr.n; ++a) {
        if (!fr.in_block(a, nu)) continue;
        for (int b = 0; b < fr.n; ++b) {
          if (!fr.in_block(b, mu)) continue;
          double w = fr.eps[static_cast<std::size_t>(a)] * fr.eps[static_cast<std::size_t>(b)];
          acc += 0.5 * w * (rf.at(a, b, a, b) + rf.at(b, a, b, a));
        }
      }
  return acc;
}

double pair_mixed_scalar_at(const Chart& chart, const AdaptedFrameField& frame, const double* x,
                            int mu, const ContorsionField* I) {
  FramePoint fr = frame.at(x);
  if (mu < 0 || mu >= fr.k) throw BadInput("block index out of range");
  Nd rc = curvature_with_contorsion_at(chart, frame, x, I);
  Nd rf = curvature_frame_components(rc, fr);
  double acc = 0.0;
  for (int a = 0; a < fr.n; ++a) {
    if (!fr.in_block(a, mu)) continue;
    for (int b = 0; b < fr.n; ++b) {
      if (fr.in_block(b, mu)) continue;
      double w = fr.eps[static_cast<std::size_t>(a)] * fr.eps[static_cast<std::size_t>(b)];
      acc += 0.5 * w * (rf.at(a, b, a, b) + rf.at(b, a, b, a));
    }
  }
  return acc;
}

double q_term(const ExtrinsicData& ex, int mu) {
  const FramePoint& fr = ex.fr;
  auto nrm = [&](const std::vector<double>& v) { return frame_vec_inner(fr, v, v); };
  double q = nrm(ex.H_tilde[static_cast<std::size_t>(mu)]) + nrm(ex.H[static_cast<std::size_t>(mu)]);
  q -= tensor_norm2(fr, ex.h[static_cast<std::size_t>(mu)]);
  q -= tensor_norm2(fr, ex.h_tilde[static_cast<std::size_t>(mu)]);
  q += tensor_norm2(fr, ex.T[static_cast<std::size_t>(mu)]);
  q += tensor_norm2(fr, ex.T_tilde[static_cast<std::size_t>(mu)]);
  return q;
}

double q_term_at(const Chart& chart, const AdaptedFrameField& frame, const double* x, int mu) {
  ExtrinsicData ex = distributions::extrinsic_at(chart, frame, x);
  if (mu < 0 || mu >= ex.k) throw BadInput("block index out of range");
  return q_term(ex, mu);
}

double qbar_term(const ExtrinsicData& ex, const Nd& icomps, int mu) {
  const FramePoint& fr = ex.fr;
  const int n = fr.n;
  Nd L = contorsion::lowered(icomps, fr);

  auto Ltr_top = contorsion::trace_top(icomps, fr, mu);
  auto Ltr_bot = contorsion::trace_bottom(icomps, fr, mu);
  // star traces: <I*_Z Z, c> = L(z, c, z)
  std::vector<double> tr_top_star(static_cast<std::size_t>(n), 0.0), tr_bot_star(static_cast<std::size_t>(n), 0.0);
  for (int z = 0; z < n; ++z) {
    bool in = fr.in_block(z, mu);
    for (int c = 0; c < n; ++c) {
      double v = fr.eps[static_cast<std::size_t>(z)] * fr.eps[static_cast<std::size_t>(c)] * L.at(z, c, z);
      if (in)
        tr_top_star[static_cast<std::size_t>(c)] += v;
      else
        tr_bot_star[static_cast<std::size_t>(c)] += v;
    }
  }

  double term1 = frame_vec_inner(fr, Ltr_top, tr_bot_star) + frame_vec_inner(fr, Ltr_bot, tr_top_star);

  std::vector<double> dtr(static_cast<std::size_t>(n)), hmh(static_cast<std::size_t>(n));
  for (int c = 0; c < n; ++c) {
    dtr[static_cast<std::size_t>(c)] = (Ltr_top[static_cast<std::size_t>(c)] - tr_top_star[static_cast<std::size_t>(c)]) -
                                       (Ltr_bot[static_cast<std::size_t>(c)] - tr_bot_star[static_cast<std::size_t>(c)]);
    hmh[static_cast<std::size_t>(c)] = ex.H[static_cast<std::size_t>(mu)][static_cast<std::size_t>(c)] -
                                       ex.H_tilde[static_cast<std::size_t>(mu)][static_cast<std::size_t>(c)];
  }
  double term2 = frame_vec_inner(fr, dtr, hmh);

  // <I - I* + I^ - I*^, Atilde - Ttilde# + A - T#> as the adapted-frame sum
  double term3 = 0.0;
  for (int a = 0; a < n; ++a) {
    if (!fr.in_block(a, mu)) continue;
    for (int b = 0; b < n; ++b) {
      if (fr.in_block(b, mu)) continue;
      double w = fr.eps[static_cast<std::size_t>(a)] * fr.eps[static_cast<std::size_t>(b)];
      double dot = 0.0;
      for (int c = 0; c < n; ++c) {
        // <(I_{E_b} - I*_{E_b}) E_a + (I_{E_a} - I*_{E_a}) E_b, E_c>
        double lhs = (L.at(b, a, c) - L.at(b, c, a)) + (L.at(a, b, c) - L.at(a, c, b));
        // <(At_{E_a} - Tt#_{E_a}) E_b + (A_{E_b} - T#_{E_b}) E_a, E_c>
        double rhs = 0.0;
        if (!fr.in_block(c, mu)) {
          rhs += fr.eps[static_cast<std::size_t>(a)] *
                 (ex.h_tilde[static_cast<std::size_t>(mu)].at(b, c, a) -
                  ex.T_tilde[static_cast<std::size_t>(mu)].at(b, c, a));
        } else {
          rhs += fr.eps[static_cast<std::size_t>(b)] *
                 (ex.h[static_cast<std::size_t>(mu)].at(a, c, b) -
                  ex.T[static_cast<std::size_t>(mu)].at(a, c, b));
        }
        dot += fr.eps[static_cast<std::size_t>(c)] * lhs * rhs;
      }
      term3 += w * dot;
    }
  }

  // <I*, I^>|V_mu
  double term4 = 0.0;
  for (int a = 0; a < n; ++a) {
    if (!fr.in_block(a, mu)) continue;
    for (int b = 0; b < n; ++b) {
      if (fr.in_block(b, mu)) continue;
      double w = fr.eps[static_cast<std::size_t>(a)] * fr.eps[static_cast<std::size_t>(b)];
      double s1 = 0.0, s2 = 0.0;
      for (int c = 0; c < n; ++c) {
        double e = fr.eps[static_cast<std::size_t>(c)];
        // <I_a E_b, E_c><I*_b E_a, E_c> summed with eps over c gives <I_a E_b, I*_b E_a>
        s1 += e * L.at(a, b, c) * L.at(b, c, a);
        s2 += e * L.at(a, c, b) * L.at(b, a, c);
      }
      term4 += w * (s1 + s2);
    }
  }

  return 0.5 * (term1 + term2 + term3 - term4);
}

double qbar_term_at(const Chart& chart, const AdaptedFrameField& frame, const double* x, int mu,
                    const ContorsionField& I) {
  ExtrinsicData ex = distributions::extrinsic_at(chart, frame, x);
  if (mu < 0 || mu >= ex.k) throw BadInput("block index out of range");
  Nd ic = I.at(x, ex.fr);
  return qbar_term(ex, ic, mu);
}

std::vector<double> y_field_at(const Chart& chart, const AdaptedFrameField& frame, const double* x,
                               const ContorsionField* I) {
  ExtrinsicData ex = distributions::extrinsic_at(chart, frame, x);
  const FramePoint& fr = ex.fr;
  const int n = fr.n;
  std::vector<double> y(static_cast<std::size_t>(n), 0.0);
  Nd ic;
  Nd L;
  if (I) {
    ic = I->at(x, fr);
    L = contorsion::lowered(ic, fr);
  }
  for (int mu = 0; mu < fr.k; ++mu) {
    for (int c = 0; c < n; ++c) {
      double v = ex.H[static_cast<std::size_t>(mu)][static_cast<std::size_t>(c)] +
                 ex.H_tilde[static_cast<std::size_t>(mu)][static_cast<std::size_t>(c)];
      y[static_cast<std::size_t>(c)] += v;
    }
    if (I) {
      // tr_bot(I - I*) projected to mu; tr_top(I - I*) projected to complement
      for (int c = 0; c < n; ++c) {
        double tb = 0.0, tt = 0.0;
        for (int z = 0; z < n; ++z) {
          double ez = fr.eps[static_cast<std::size_t>(z)];
          double diff = fr.eps[static_cast<std::size_t>(c)] * (L.at(z, z, c) - L.at(z, c, z));
          if (fr.in_block(z, mu))
            tt += ez * diff;
          else
            tb += ez * diff;
        }
        if (fr.in_block(c, mu))
          y[static_cast<std::size_t>(c)] += 0.5 * tb;
        else
          y[static_cast<std::size_t>(c)] += 0.5 * tt;
      }
    }
  }
  (void)chart;
  return y;
}

double divergence_identity_residual(const Chart& chart, const AdaptedFrameField& frame,
                                    const double* x, const ContorsionField* I) {
  VectorFieldFn yf = [&chart, &frame, I](const double* p, double* out) {
    std::vector<double> yfr = y_field_at(chart, frame, p, I);
    FramePoint fr = frame.at(p);
    fr.to_coord(yfr.data(), out);
  };
  double div_y = geometry::divergence_at(yf, chart, x);
  double sbar = mixed_scalar_at(chart, frame, x, I);
  ExtrinsicData ex = distributions::extrinsic_at(chart, frame, x);
  Nd ic;
  if (I) ic = I->at(x, ex.fr);
  double qsum = 0.0;
  for (int mu = 0; mu < ex.k; ++mu) {
    qsum += q_term(ex, mu);
    if (I) qsum += qbar_term(ex, ic, mu);
  }
  return std::fabs(div_y - 2.0 * sbar + qsum);
}

namespace {

// Gauss-Legendre nodes/weights on [-1, 1], by Newton iteration on the
// Legendre recurrence. Deterministic for a given N.
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.resize(static_cast<std::size_t>(n));
  weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      double dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-15) break;
    }
    double p0 = 1.0, p1 = x;
    for (int j = 2; j <= n; ++j) {
      double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
      p0 = p1;
      p1 = p2;
    }
    double dp = n * (x * p1 - p0) / (x * x - 1.0);
    nodes[static_cast<std::size_t>(i)] = x;
    weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

}  // namespace

double integrate(const Chart& chart, const QuadratureGrid& grid,
                 const std::function<double(const double*)>& f) {
  const int n = chart.n;
  std::vector<std::vector<double>> nodes(static_cast<std::size_t>(n)), weights(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    int N = grid.nodes_per_axis[static_cast<std::size_t>(i)];
    double lo = chart.lo[static_cast<std::size_t>(i)], hi = chart.hi[static_cast<std::size_t>(i)];
    if (chart.periodic[static_cast<std::size_t>(i)]) {
      double dx = (hi - lo) / N;
      for (int j = 0; j < N; ++j) {
        nodes[static_cast<std::size_t>(i)].push_back(lo + j * dx);
        weights[static_cast<std::size_t>(i)].push_back(dx);
      }
    } else {
      // Gauss-Legendre: interior nodes (no boundary evaluations) and far
      // better accuracy than composite rules for smooth integrands
      std::vector<double> gx, gw;
      gauss_legendre(N, gx, gw);
      double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
      for (int j = 0; j < N; ++j) {
        nodes[static_cast<std::size_t>(i)].push_back(mid + half * gx[static_cast<std::size_t>(j)]);
        weights[static_cast<std::size_t>(i)].push_back(half * gw[static_cast<std::size_t>(j)]);
      }
    }
  }
  std::size_t total = 1;
  for (int i = 0; i < n; ++i) total *= nodes[static_cast<std::size_t>(i)].size();

  std::vector<double> vals(total);
  parallel_for(total, [&](std::size_t flat) {
    std::vector<double> x(static_cast<std::size_t>(n));
    double w = 1.0;
    std::size_t rest = flat;
    for (int i = n - 1; i >= 0; --i) {
      std::size_t N = nodes[static_cast<std::size_t>(i)].size();
      std::size_t j = rest % N;
      rest /= N;
      x[static_cast<std::size_t>(i)] = nodes[static_cast<std::size_t>(i)][j];
      w *= weights[static_cast<std::size_t>(i)][j];
    }
    double fx = f(x.data());
    if (!std::isfinite(fx)) throw NumericalInstability("non-finite integrand in quadrature");
    vals[flat] = w * fx;
  });
  // deterministic pairwise reduction
  std::vector<double> acc = vals;
  std::size_t m = acc.size();
  while (m > 1) {
    std::size_t half = (m + 1) / 2;
    for (std::size_t i = 0; i + half < m; ++i) acc[i] += acc[i + half];
    m = half;
  }
  return acc.empty() ? 0.0 : acc[0];
}

double action_integral(const Chart& chart, const AdaptedFrameField& frame, const QuadratureGrid& grid,
                       const ContorsionField* I) {
  return integrate(chart, grid, [&](const double* x) {
    double s = mixed_scalar_at(chart, frame, x, I);
    double d = geometry::metric_det_at(chart, x);
    return s * std::sqrt(std::fabs(d));
  });
}

}  // namespace functionals
}  // namespace mixedcurv
