#include "mixedcurv/distributions.hpp"

#include <cmath>

#include "mixedcurv/errors.hpp"
#include "mixedcurv/kernels.hpp"
#include "mixedcurv/linalg.hpp"

namespace mixedcurv {

double FramePoint::inner_coord(const double* v, const double* w) const {
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    double gi = kernels::dot(&g[static_cast<std::size_t>(i) * n], w, static_cast<std::size_t>(n));
    acc += v[i] * gi;
  }
  return acc;
}

double FramePoint::frame_comp(const double* w, int a) const {
  return eps[static_cast<std::size_t>(a)] * inner_coord(w, vec(a));
}

void FramePoint::to_coord(const double* frame_comps, double* out) const {
  for (int c = 0; c < n; ++c) out[c] = 0.0;
  for (int i = 0; i < n; ++i) kernels::axpy(frame_comps[i], vec(i), out, static_cast<std::size_t>(n));
}

FramePoint AdaptedFrameField::at(const double* x) const {
  const int n = chart->n;
  FramePoint fp;
  fp.n = n;
  fp.k = split.k();
  fp.dims = split.dims;
  fp.offset.resize(fp.dims.size());
  int off = 0;
  for (std::size_t mu = 0; mu < fp.dims.size(); ++mu) {
    fp.offset[mu] = off;
    off += fp.dims[mu];
  }
  fp.g = geometry::metric_at(*chart, x);
  fp.ginv = linalg::inverse(fp.g, n, 1e-10);
  fp.E.assign(static_cast<std::size_t>(n) * n, 0.0);
  fp.eps.assign(static_cast<std::size_t>(n), 1.0);

  std::vector<double> xc(x, x + n);
  chart->wrap(xc.data());

  // Block Gram-Schmidt in declared order, no pivoting; hyperbolic
  // normalization extracts the sign for pseudo-Riemannian blocks.
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    split.raw_spans[static_cast<std::size_t>(i)](xc.data(), v.data());
    for (int j = 0; j < i; ++j) {
      double c = fp.eps[static_cast<std::size_t>(j)] * fp.inner_coord(v.data(), fp.vec(j));
      kernels::axpy(-c, fp.vec(j), v.data(), static_cast<std::size_t>(n));
    }
    double q = fp.inner_coord(v.data(), v.data());
    if (std::fabs(q) < 1e-10) throw DegenerateDistribution("zero-norm vector in block Gram-Schmidt at index " + std::to_string(i));
    fp.eps[static_cast<std::size_t>(i)] = (q > 0) ? 1.0 : -1.0;
    double inv = 1.0 / std::sqrt(std::fabs(q));
    for (int c = 0; c < n; ++c) fp.E[static_cast<std::size_t>(i) * n + c] = v[static_cast<std::size_t>(c)] * inv;
  }
  return fp;
}

void AdaptedFrameField::components(const double* x, double* out) const {
  FramePoint fp = at(x);
  for (std::size_t i = 0; i < fp.E.size(); ++i) out[i] = fp.E[i];
}

namespace {

// frame components of a coordinate vector value
void store_value(const FramePoint& fr, const double* w, int a, int b, Nd& dst) {
  for (int c = 0; c < fr.n; ++c) dst.at(a, b, c) = fr.frame_comp(w, c);
}

}  // namespace

Nd ExtrinsicData::shape_op(int mu, int z) const {
  Nd op({n, n});
  for (int a = 0; a < n; ++a) {
    if (!fr.in_block(a, mu)) continue;
    for (int b = 0; b < n; ++b) {
      if (!fr.in_block(b, mu)) continue;
      // <A_z E_a, E_b> = <h(E_a,E_b), E_z>; comp b of A_z(E_a) carries eps_b
      op.at(a, b) = fr.eps[static_cast<std::size_t>(b)] * fr.eps[static_cast<std::size_t>(z)] *
                    h[static_cast<std::size_t>(mu)].at(a, b, z);
    }
  }
  return op;
}

Nd ExtrinsicData::tsharp_op(int mu, int z) const {
  Nd op({n, n});
  for (int a = 0; a < n; ++a) {
    if (!fr.in_block(a, mu)) continue;
    for (int b = 0; b < n; ++b) {
      if (!fr.in_block(b, mu)) continue;
      double tz = T[static_cast<std::size_t>(mu)].at(a, b, z);
      op.at(a, b) = fr.eps[static_cast<std::size_t>(b)] * fr.eps[static_cast<std::size_t>(z)] * tz;
    }
  }
  return op;
}

Nd ExtrinsicData::shape_op_perp(int mu, int z) const {
  Nd op({n, n});
  for (int a = 0; a < n; ++a) {
    if (fr.in_block(a, mu)) continue;
    for (int b = 0; b < n; ++b) {
      if (fr.in_block(b, mu)) continue;
      double hz = h_tilde[static_cast<std::size_t>(mu)].at(a, b, z);
      op.at(a, b) = fr.eps[static_cast<std::size_t>(b)] * fr.eps[static_cast<std::size_t>(z)] * hz;
    }
  }
  return op;
}

Nd ExtrinsicData::tsharp_op_perp(int mu, int z) const {
  Nd op({n, n});
  for (int a = 0; a < n; ++a) {
    if (fr.in_block(a, mu)) continue;
    for (int b = 0; b < n; ++b) {
      if (fr.in_block(b, mu)) continue;
      double tz = T_tilde[static_cast<std::size_t>(mu)].at(a, b, z);
      op.at(a, b) = fr.eps[static_cast<std::size_t>(b)] * fr.eps[static_cast<std::size_t>(z)] * tz;
    }
  }
  return op;
}

namespace distributions {

AdaptedFrameField build_adapted_frame(const Chart& chart, const SplitSpec& split) {
  if (split.total() != chart.n) throw BadInput("split dimensions must sum to chart dimension");
  if (static_cast<int>(split.raw_spans.size()) != chart.n) throw BadInput("need one spanning field per dimension");
  AdaptedFrameField f;
  f.chart = std::make_shared<Chart>(chart);
  f.split = split;
  return f;
}

ExtrinsicData extrinsic_at(const Chart& chart, const AdaptedFrameField& frame, const double* x) {
  const int n = chart.n;
  ExtrinsicData ex;
  ex.n = n;
  ex.k = frame.split.k();
  ex.fr = frame.at(x);
  const FramePoint& fr = ex.fr;

  // nabla_{E_a} E_b in coordinates, from FD of frame components + Christoffels
  auto cb = [&frame](const double* p, double* out) { frame.components(p, out); };
  std::vector<double> dE = geometry::partials(cb, n * n, chart, x);  // dE[c*(n*n) + i*n + l] = d_c E_i^l
  Nd gamma = geometry::christoffel_at(chart, x);

  ex.nabla.reshape({n, n, n});
  for (int a = 0; a < n; ++a) {
    const double* Ea = fr.vec(a);
    for (int b = 0; b < n; ++b) {
      for (int l = 0; l < n; ++l) {
        double acc = 0.0;
        for (int c = 0; c < n; ++c) {
          double dEb = dE[static_cast<std::size_t>(c) * n * n + static_cast<std::size_t>(b) * n + l];
          double chr = 0.0;
          for (int m = 0; m < n; ++m) chr += gamma.at(c, m, l) * fr.E[static_cast<std::size_t>(b) * n + m];
          acc += Ea[c] * (dEb + chr);
        }
        ex.nabla.at(a, b, l) = acc;
      }
    }
  }

  const int k = ex.k;
  ex.h.assign(static_cast<std::size_t>(k), Nd({n, n, n}));
  ex.T.assign(static_cast<std::size_t>(k), Nd({n, n, n}));
  ex.h_tilde.assign(static_cast<std::size_t>(k), Nd({n, n, n}));
  ex.T_tilde.assign(static_cast<std::size_t>(k), Nd({n, n, n}));
  ex.H.assign(static_cast<std::size_t>(k), std::vector<double>(static_cast<std::size_t>(n), 0.0));
  ex.H_tilde.assign(static_cast<std::size_t>(k), std::vector<double>(static_cast<std::size_t>(n), 0.0));
  ex.h_pair.assign(static_cast<std::size_t>(k), std::vector<Nd>(static_cast<std::size_t>(k), Nd({n, n, n})));
  ex.T_pair.assign(static_cast<std::size_t>(k), std::vector<Nd>(static_cast<std::size_t>(k), Nd({n, n, n})));

  std::vector<double> w(static_cast<std::size_t>(n));
  auto val = [&](int a, int b, double sgn) {
    for (int l = 0; l < n; ++l)
      w[static_cast<std::size_t>(l)] = 0.5 * (ex.nabla.at(a, b, l) + sgn * ex.nabla.at(b, a, l));
  };

  for (int mu = 0; mu < k; ++mu) {
    Nd& h = ex.h[static_cast<std::size_t>(mu)];
    Nd& T = ex.T[static_cast<std::size_t>(mu)];
    Nd& ht = ex.h_tilde[static_cast<std::size_t>(mu)];
    Nd& Tt = ex.T_tilde[static_cast<std::size_t>(mu)];
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        bool a_in = fr.in_block(a, mu), b_in = fr.in_block(b, mu);
        if (a_in && b_in) {
          val(a, b, +1.0);
          for (int c = 0; c < n; ++c)
            if (!fr.in_block(c, mu)) h.at(a, b, c) = fr.frame_comp(w.data(), c);
          val(a, b, -1.0);
          for (int c = 0; c < n; ++c)
            if (!fr.in_block(c, mu)) T.at(a, b, c) = fr.frame_comp(w.data(), c);
        } else if (!a_in && !b_in) {
          val(a, b, +1.0);
          for (int c = 0; c < n; ++c)
            if (fr.in_block(c, mu)) ht.at(a, b, c) = fr.frame_comp(w.data(), c);
          val(a, b, -1.0);
          for (int c = 0; c < n; ++c)
            if (fr.in_block(c, mu)) Tt.at(a, b, c) = fr.frame_comp(w.data(), c);
        }
      }
    }
    for (int a = 0; a < n; ++a) {
      if (fr.in_block(a, mu)) {
        for (int c = 0; c < n; ++c)
          ex.H[static_cast<std::size_t>(mu)][static_cast<std::size_t>(c)] +=
              fr.eps[static_cast<std::size_t>(a)] * h.at(a, a, c);
      } else {
        for (int c = 0; c < n; ++c)
          ex.H_tilde[static_cast<std::size_t>(mu)][static_cast<std::size_t>(c)] +=
              fr.eps[static_cast<std::size_t>(a)] * ht.at(a, a, c);
      }
    }
  }

  // cross-block second fundamental forms of D_mu + D_nu
  for (int mu = 0; mu < k; ++mu) {
    for (int nu = 0; nu < k; ++nu) {
      if (nu == mu) continue;
      Nd& hp = ex.h_pair[static_cast<std::size_t>(mu)][static_cast<std::size_t>(nu)];
      Nd& tp = ex.T_pair[static_cast<std::size_t>(mu)][static_cast<std::size_t>(nu)];
      for (int a = 0; a < n; ++a) {
        if (!fr.in_block(a, mu)) continue;
        for (int b = 0; b < n; ++b) {
          if (!fr.in_block(b, nu)) continue;
          val(a, b, +1.0);
          for (int c = 0; c < n; ++c)
            if (!fr.in_block(c, mu) && !fr.in_block(c, nu)) hp.at(a, b, c) = fr.frame_comp(w.data(), c);
          val(a, b, -1.0);
          for (int c = 0; c < n; ++c)
            if (!fr.in_block(c, mu) && !fr.in_block(c, nu)) tp.at(a, b, c) = fr.frame_comp(w.data(), c);
        }
      }
    }
  }

  // Casorati operators: casorati_t[mu] = sum_i eps_i (Tsharp_i)^2 on D_mu,
  // casorati_k[mu] = sum_i eps_i [Tsharp_i, A_i]; perp versions sum over the
  // block frame and act on the complement.
  ex.casorati_t.assign(static_cast<std::size_t>(k), Nd({n, n}));
  ex.casorati_k.assign(static_cast<std::size_t>(k), Nd({n, n}));
  ex.casorati_t_perp.assign(static_cast<std::size_t>(k), Nd({n, n}));
  ex.casorati_k_perp.assign(static_cast<std::size_t>(k), Nd({n, n}));

  auto compose = [n](const Nd& f, const Nd& s) {
    // (s o f)(E_x) = sum_z [sum_y f(x,y) s(y,z)] E_z
    Nd out({n, n});
    for (int xi = 0; xi < n; ++xi)
      for (int z = 0; z < n; ++z) {
        double acc = 0.0;
        for (int y = 0; y < n; ++y) acc += f.at(xi, y) * s.at(y, z);
        out.at(xi, z) = acc;
      }
    return out;
  };

  for (int mu = 0; mu < k; ++mu) {
    for (int z = 0; z < n; ++z) {
      if (!fr.in_block(z, mu)) {
        Nd ts = ex.tsharp_op(mu, z);
        Nd as = ex.shape_op(mu, z);
        Nd ts2 = compose(ts, ts);
        Nd tsas = compose(ts, as);   // note row-convention: this is A after Tsharp
        Nd asts = compose(as, ts);
        double e = fr.eps[static_cast<std::size_t>(z)];
        for (std::size_t q = 0; q < ts2.size(); ++q) {
          ex.casorati_t[static_cast<std::size_t>(mu)][q] += e * ts2[q];
          // [Tsharp, A] = Tsharp o A - A o Tsharp; with row convention
          // (s o f).at = sum f s, so Tsharp o A has f = A, s = Tsharp.
          ex.casorati_k[static_cast<std::size_t>(mu)][q] += e * (asts[q] - tsas[q]);
        }
      } else {
        Nd ts = ex.tsharp_op_perp(mu, z);
        Nd as = ex.shape_op_perp(mu, z);
        Nd ts2 = compose(ts, ts);
        Nd tsas = compose(ts, as);
        Nd asts = compose(as, ts);
        double e = fr.eps[static_cast<std::size_t>(z)];
        for (std::size_t q = 0; q < ts2.size(); ++q) {
          ex.casorati_t_perp[static_cast<std::size_t>(mu)][q] += e * ts2[q];
          ex.casorati_k_perp[static_cast<std::size_t>(mu)][q] += e * (asts[q] - tsas[q]);
        }
      }
    }
  }

  return ex;
}

StructureFlags structure_flags(const Chart& chart, const AdaptedFrameField& frame,
                               const std::vector<std::vector<double>>& sample_points, double tol) {
  if (sample_points.empty()) throw BadInput("structure_flags needs at least one sample point");
  const int k = frame.split.k();
  StructureFlags out;
  out.tol = tol;
  out.integrable.assign(static_cast<std::size_t>(k), true);
  out.totally_geodesic.assign(static_cast<std::size_t>(k), true);
  out.umbilical.assign(static_cast<std::size_t>(k), true);
  out.harmonic.assign(static_cast<std::size_t>(k), true);
  out.integrable_w.assign(static_cast<std::size_t>(k), {});
  out.totally_geodesic_w.assign(static_cast<std::size_t>(k), {});
  out.umbilical_w.assign(static_cast<std::size_t>(k), {});
  out.harmonic_w.assign(static_cast<std::size_t>(k), {});
  out.mixed_totally_geodesic.assign(static_cast<std::size_t>(k), std::vector<bool>(static_cast<std::size_t>(k), true));
  out.mixed_integrable.assign(static_cast<std::size_t>(k), std::vector<bool>(static_cast<std::size_t>(k), true));
  out.mixed_tg_w.assign(static_cast<std::size_t>(k), std::vector<FlagWitness>(static_cast<std::size_t>(k)));
  out.mixed_int_w.assign(static_cast<std::size_t>(k), std::vector<FlagWitness>(static_cast<std::size_t>(k)));

  auto bump = [&](FlagWitness& w, double r, const std::vector<double>& p) {
    if (r > w.max_residual) {
      w.max_residual = r;
      w.point = p;
    }
  };

  for (const auto& p : sample_points) {
    ExtrinsicData ex = distributions::extrinsic_at(chart, frame, p.data());
    const FramePoint& fr = ex.fr;
    const int n = ex.n;
    for (int mu = 0; mu < k; ++mu) {
      double rT = 0.0, rh = 0.0, rumb = 0.0, rH = 0.0;
      int nmu = fr.dims[static_cast<std::size_t>(mu)];
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          for (int c = 0; c < n; ++c) {
            rT = std::max(rT, std::fabs(ex.T[static_cast<std::size_t>(mu)].at(a, b, c)));
            rh = std::max(rh, std::fabs(ex.h[static_cast<std::size_t>(mu)].at(a, b, c)));
            double umb = ex.h[static_cast<std::size_t>(mu)].at(a, b, c);
            if (fr.in_block(a, mu) && fr.in_block(b, mu)) {
              double gab = (a == b) ? fr.eps[static_cast<std::size_t>(a)] : 0.0;
              umb -= gab / static_cast<double>(nmu) * ex.H[static_cast<std::size_t>(mu)][static_cast<std::size_t>(c)];
              rumb = std::max(rumb, std::fabs(umb));
            }
          }
      for (int c = 0; c < n; ++c) rH = std::max(rH, std::fabs(ex.H[static_cast<std::size_t>(mu)][static_cast<std::size_t>(c)]));
      if (rT > tol) out.integrable[static_cast<std::size_t>(mu)] = false;
      if (rh > tol) out.totally_geodesic[static_cast<std::size_t>(mu)] = false;
      if (rumb > tol) out.umbilical[static_cast<std::size_t>(mu)] = false;
      if (rH > tol) out.harmonic[static_cast<std::size_t>(mu)] = false;
      bump(out.integrable_w[static_cast<std::size_t>(mu)], rT, p);
      bump(out.totally_geodesic_w[static_cast<std::size_t>(mu)], rh, p);
      bump(out.umbilical_w[static_cast<std::size_t>(mu)], rumb, p);
      bump(out.harmonic_w[static_cast<std::size_t>(mu)], rH, p);
      for (int nu = 0; nu < k; ++nu) {
        if (nu == mu) continue;
        double rmh = 0.0, rmT = 0.0;
        for (std::size_t q = 0; q < ex.h_pair[static_cast<std::size_t>(mu)][static_cast<std::size_t>(nu)].size(); ++q) {
          rmh = std::max(rmh, std::fabs(ex.h_pair[static_cast<std::size_t>(mu)][static_cast<std::size_t>(nu)][q]));
          rmT = std::max(rmT, std::fabs(ex.T_pair[static_cast<std::size_t>(mu)][static_cast<std::size_t>(nu)][q]));
        }
        if (rmh > tol) out.mixed_totally_geodesic[static_cast<std::size_t>(mu)][static_cast<std::size_t>(nu)] = false;
        if (rmT > tol) out.mixed_integrable[static_cast<std::size_t>(mu)][static_cast<std::size_t>(nu)] = false;
        bump(out.mixed_tg_w[static_cast<std::size_t>(mu)][static_cast<std::size_t>(nu)], rmh, p);
        bump(out.mixed_int_w[static_cast<std::size_t>(mu)][static_cast<std::size_t>(nu)], rmT, p);
      }
    }
  }
  return out;
}

}  // namespace distributions
}  // namespace mixedcurv
