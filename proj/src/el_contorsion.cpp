#include "mixedcurv/el_contorsion.hpp"

#include <cmath>

#include "mixedcurv/errors.hpp"
#include "mixedcurv/linalg.hpp"

namespace mixedcurv::el_contorsion {

namespace {

double vec_comp(const FramePoint& fr, const std::vector<double>& v, int c) {
  // <V, E_c> for a frame-component vector
  return fr.eps[static_cast<std::size_t>(c)] * v[static_cast<std::size_t>(c)];
}

}  // namespace

ContorsionELResiduals contorsion_el_residuals_at(const Chart& chart, const AdaptedFrameField& frame,
                                                 const double* x, const ContorsionField& I) {
  ExtrinsicData ex = distributions::extrinsic_at(chart, frame, x);
  const FramePoint& fr = ex.fr;
  const int n = fr.n;
  const int k = fr.k;
  Nd ic = I.at(x, fr);
  Nd L = contorsion::lowered(ic, fr);

  // trace vectors per block
  std::vector<std::vector<double>> trt(static_cast<std::size_t>(k)), trb(static_cast<std::size_t>(k));
  std::vector<std::vector<double>> trt_star(static_cast<std::size_t>(k)), trb_star(static_cast<std::size_t>(k));
  for (int mu = 0; mu < k; ++mu) {
    trt[static_cast<std::size_t>(mu)] = contorsion::trace_top(ic, fr, mu);
    trb[static_cast<std::size_t>(mu)] = contorsion::trace_bottom(ic, fr, mu);
    trt_star[static_cast<std::size_t>(mu)].assign(static_cast<std::size_t>(n), 0.0);
    trb_star[static_cast<std::size_t>(mu)].assign(static_cast<std::size_t>(n), 0.0);
    for (int z = 0; z < n; ++z) {
      bool in = fr.in_block(z, mu);
      for (int c = 0; c < n; ++c) {
        double v = fr.eps[static_cast<std::size_t>(z)] * fr.eps[static_cast<std::size_t>(c)] * L.at(z, c, z);
        if (in)
          trt_star[static_cast<std::size_t>(mu)][static_cast<std::size_t>(c)] += v;
        else
          trb_star[static_cast<std::size_t>(mu)][static_cast<std::size_t>(c)] += v;
      }
    }
  }

  ContorsionELResiduals out;
  out.k = k;
  out.r1.assign(static_cast<std::size_t>(k), Nd());
  out.r2.assign(static_cast<std::size_t>(k), std::vector<Nd>(static_cast<std::size_t>(k)));
  out.r3 = out.r2;
  out.r4 = out.r2;
  out.r5.assign(static_cast<std::size_t>(k),
                std::vector<std::vector<Nd>>(static_cast<std::size_t>(k), std::vector<Nd>(static_cast<std::size_t>(k))));

  for (int mu = 0; mu < k; ++mu) {
    int nm = fr.dims[static_cast<std::size_t>(mu)];
    int om = fr.offset[static_cast<std::size_t>(mu)];
    Nd& r1 = out.r1[static_cast<std::size_t>(mu)];
    r1.reshape({nm, nm, nm});
    for (int a = 0; a < nm; ++a)
      for (int b = 0; b < nm; ++b)
        for (int c = 0; c < nm; ++c) {
          double v = 0.0;
          if (a == b)
            v += vec_comp(fr, trb_star[static_cast<std::size_t>(mu)], om + c) -
                 vec_comp(fr, ex.H_tilde[static_cast<std::size_t>(mu)], om + c);
          if (a == c)
            v += vec_comp(fr, trb[static_cast<std::size_t>(mu)], om + b) +
                 vec_comp(fr, ex.H_tilde[static_cast<std::size_t>(mu)], om + b);
          r1.at(a, b, c) = v;
          out.max1 = std::max(out.max1, std::fabs(v));
        }

    for (int rho = 0; rho < k; ++rho) {
      if (rho == mu) continue;
      int nr = fr.dims[static_cast<std::size_t>(rho)];
      int orr = fr.offset[static_cast<std::size_t>(rho)];
      Nd& r2 = out.r2[static_cast<std::size_t>(mu)][static_cast<std::size_t>(rho)];
      Nd& r3 = out.r3[static_cast<std::size_t>(mu)][static_cast<std::size_t>(rho)];
      Nd& r4 = out.r4[static_cast<std::size_t>(mu)][static_cast<std::size_t>(rho)];
      r2.reshape({nm, nm, nr});
      r3.reshape({nm, nm, nr});
      r4.reshape({nm, nm, nr});
      for (int a = 0; a < nm; ++a)
        for (int b = 0; b < nm; ++b)
          for (int i = 0; i < nr; ++i) {
            int ga = om + a, gb = om + b, gi = orr + i;
            double ei = fr.eps[static_cast<std::size_t>(gi)];
            double v2 = 0.0;
            if (a == b)
              v2 += vec_comp(fr, trb_star[static_cast<std::size_t>(mu)], gi) +
                    vec_comp(fr, ex.H[static_cast<std::size_t>(mu)], gi);
            v2 -= ei * (ex.h[static_cast<std::size_t>(mu)].at(ga, gb, gi) - ex.T[static_cast<std::size_t>(mu)].at(ga, gb, gi));
            v2 -= L.at(gi, ga, gb);
            r2.at(a, b, i) = v2;
            out.max2 = std::max(out.max2, std::fabs(v2));

            double v3 = 0.0;
            if (a == b)
              v3 += vec_comp(fr, trb[static_cast<std::size_t>(mu)], gi) -
                    vec_comp(fr, ex.H[static_cast<std::size_t>(mu)], gi);
            v3 += ei * (ex.h[static_cast<std::size_t>(mu)].at(gb, ga, gi) + ex.T[static_cast<std::size_t>(mu)].at(gb, ga, gi));
            v3 -= L.at(gi, gb, ga);
            r3.at(a, b, i) = v3;
            out.max3 = std::max(out.max3, std::fabs(v3));

            double v4 = 2.0 * ei * ex.T[static_cast<std::size_t>(mu)].at(ga, gb, gi);
            v4 += L.at(ga, gb, gi) + L.at(gb, gi, ga);
            r4.at(a, b, i) = v4;
            out.max4 = std::max(out.max4, std::fabs(v4));
          }

      for (int xi = 0; xi < k; ++xi) {
        if (xi == mu || xi == rho) continue;
        int nx = fr.dims[static_cast<std::size_t>(xi)];
        int ox = fr.offset[static_cast<std::size_t>(xi)];
        Nd& r5 = out.r5[static_cast<std::size_t>(mu)][static_cast<std::size_t>(rho)][static_cast<std::size_t>(xi)];
        r5.reshape({nm, nr, nx});
        for (int a = 0; a < nm; ++a)
          for (int j = 0; j < nr; ++j)
            for (int l = 0; l < nx; ++l) {
              int ga = om + a, gj = orr + j, gl = ox + l;
              double ea = fr.eps[static_cast<std::size_t>(ga)];
              double ej = fr.eps[static_cast<std::size_t>(gj)];
              double el = fr.eps[static_cast<std::size_t>(gl)];
              double v = 2.0 * ea * ex.T_tilde[static_cast<std::size_t>(mu)].at(gj, gl, ga);
              v += el * (ex.h_tilde[static_cast<std::size_t>(xi)].at(gj, ga, gl) +
                         ex.T_tilde[static_cast<std::size_t>(xi)].at(gj, ga, gl));
              v += 2.0 * L.at(gl, ga, gj);
              v -= ej * (ex.h_tilde[static_cast<std::size_t>(rho)].at(gl, ga, gj) +
                         ex.T_tilde[static_cast<std::size_t>(rho)].at(gl, ga, gj));
              v += 2.0 * L.at(gj, gl, ga);
              r5.at(a, j, l) = v;
              out.max5 = std::max(out.max5, std::fabs(v));
            }
      }
    }
  }
  return out;
}

CheckReport corI_check(const Chart& chart, const AdaptedFrameField& frame,
                       const std::vector<std::vector<double>>& sample_points,
                       const ContorsionField& I, double tol) {
  CheckReport rep;
  const int k = frame.split.k();
  std::vector<double> umb(static_cast<std::size_t>(k), 0.0);
  double ra = 0.0, rb = 0.0, rc = 0.0, rd = 0.0, re = 0.0, rx = 0.0;

  for (const auto& p : sample_points) {
    ExtrinsicData ex = distributions::extrinsic_at(chart, frame, p.data());
    const FramePoint& fr = ex.fr;
    const int n = fr.n;
    Nd ic = I.at(p.data(), fr);
    Nd L = contorsion::lowered(ic, fr);

    for (int mu = 0; mu < k; ++mu) {
      int nm = fr.dims[static_cast<std::size_t>(mu)];
      auto trb = contorsion::trace_bottom(ic, fr, mu);
      std::vector<double> trb_star(static_cast<std::size_t>(n), 0.0);
      for (int z = 0; z < n; ++z) {
        if (fr.in_block(z, mu)) continue;
        for (int c = 0; c < n; ++c)
          trb_star[static_cast<std::size_t>(c)] += fr.eps[static_cast<std::size_t>(z)] * fr.eps[static_cast<std::size_t>(c)] * L.at(z, c, z);
      }

      // umbilicity of the block
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          if (!fr.in_block(a, mu) || !fr.in_block(b, mu)) continue;
          double gab = (a == b) ? fr.eps[static_cast<std::size_t>(a)] : 0.0;
          for (int c = 0; c < n; ++c) {
            double v = ex.h[static_cast<std::size_t>(mu)].at(a, b, c) -
                       gab / nm * ex.H[static_cast<std::size_t>(mu)][static_cast<std::size_t>(c)];
            umb[static_cast<std::size_t>(mu)] = std::max(umb[static_cast<std::size_t>(mu)], std::fabs(v));
          }
        }

      if (nm > 1) {
        for (int c = 0; c < n; ++c) {
          if (!fr.in_block(c, mu)) continue;
          double htc = vec_comp(fr, ex.H_tilde[static_cast<std::size_t>(mu)], c);
          ra = std::max(ra, std::fabs(vec_comp(fr, trb_star, c) - htc));
          ra = std::max(ra, std::fabs(vec_comp(fr, trb, c) + htc));
        }
      }

      for (int u = 0; u < n; ++u) {
        if (fr.in_block(u, mu)) continue;
        double eu = fr.eps[static_cast<std::size_t>(u)];
        for (int a = 0; a < n; ++a) {
          if (!fr.in_block(a, mu)) continue;
          for (int b = 0; b < n; ++b) {
            if (!fr.in_block(b, mu)) continue;
            double tv = eu * ex.T[static_cast<std::size_t>(mu)].at(a, b, u);
            rb = std::max(rb, std::fabs(L.at(u, a, b) - L.at(u, b, a) - 2.0 * tv));
            double gab = (a == b) ? fr.eps[static_cast<std::size_t>(a)] : 0.0;
            double trsum = 0.0;
            for (int z = 0; z < n; ++z) {
              if (fr.in_block(z, mu)) continue;
              trsum += fr.eps[static_cast<std::size_t>(z)] * (L.at(z, z, u) + L.at(z, u, z));
            }
            rc = std::max(rc, std::fabs(L.at(u, a, b) + L.at(u, b, a) - trsum * gab));
            re = std::max(re, std::fabs(L.at(a, b, u) + L.at(b, u, a) + 2.0 * tv));
          }
        }
      }

      for (int c = 0; c < n; ++c) {
        if (fr.in_block(c, mu)) continue;
        double lhs = 0.0;
        for (int z = 0; z < n; ++z) {
          if (fr.in_block(z, mu)) continue;
          lhs += fr.eps[static_cast<std::size_t>(z)] * (L.at(z, z, c) - L.at(z, c, z));
        }
        lhs *= fr.eps[static_cast<std::size_t>(c)];  // <P_perp tr_bot(I - I*), E_c> via eps
        double rhs = (2.0 - 2.0 / nm) * vec_comp(fr, ex.H[static_cast<std::size_t>(mu)], c);
        rd = std::max(rd, std::fabs(fr.eps[static_cast<std::size_t>(c)] * lhs - rhs));
      }
    }

    for (int mu = 0; mu < k; ++mu)
      for (int rho = 0; rho < k; ++rho)
        for (int xi = 0; xi < k; ++xi) {
          if (mu == rho || rho == xi || mu == xi) continue;
          for (int a = 0; a < n; ++a) {
            if (!fr.in_block(a, mu)) continue;
            for (int y = 0; y < n; ++y) {
              if (!fr.in_block(y, rho)) continue;
              for (int z = 0; z < n; ++z) {
                if (!fr.in_block(z, xi)) continue;
                rx = std::max(rx, std::fabs(L.at(y, z, a) + L.at(z, a, y)));
              }
            }
          }
        }
  }

  double umb_all = 0.0;
  for (double v : umb) umb_all = std::max(umb_all, v);
  rep.add("umbilical", umb_all, 0.0, tol);
  rep.add("trace_condition", ra, 0.0, tol);
  rep.add("antisym_vs_integrability", rb, 0.0, tol);
  rep.add("sym_trace_identity", rc, 0.0, tol);
  rep.add("perp_trace_vs_mean_curvature", rd, 0.0, tol);
  rep.add("perp_sym_vs_integrability", re, 0.0, tol);
  rep.add("cross_distribution", rx, 0.0, tol);
  return rep;
}

StatELResiduals stat_el_residuals_at(const Chart& chart, const AdaptedFrameField& frame,
                                     const double* x, const ContorsionField& I) {
  if (I.flavor != ContorsionFlavor::Statistical) throw FlavorViolation("statistical residuals need a statistical contorsion");
  FramePoint fr = frame.at(x);
  const int n = fr.n;
  Nd ic = I.at(x, fr);
  Nd L = contorsion::lowered(ic, fr);
  StatELResiduals out;
  for (int mu = 0; mu < fr.k; ++mu) {
    auto trb = contorsion::trace_bottom(ic, fr, mu);
    for (int c = 0; c < n; ++c) {
      if (fr.in_block(c, mu))
        out.trace_proj = std::max(out.trace_proj, std::fabs(trb[static_cast<std::size_t>(c)]));
    }
    for (int xx = 0; xx < n; ++xx) {
      if (!fr.in_block(xx, mu)) continue;
      for (int u = 0; u < n; ++u) {
        if (!fr.in_block(u, mu)) continue;
        double gxu = (xx == u) ? fr.eps[static_cast<std::size_t>(xx)] : 0.0;
        for (int c = 0; c < n; ++c) {
          if (fr.in_block(c, mu)) continue;
          double v = 2.0 * ic.at(xx, u, c) + gxu * trb[static_cast<std::size_t>(c)];
          out.in_block = std::max(out.in_block, std::fabs(v));
        }
      }
    }
  }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        int ba = fr.block_of(a), bb = fr.block_of(b), bc = fr.block_of(c);
        if (ba == bb || bb == bc || ba == bc) continue;
        out.cross_block = std::max(out.cross_block, std::fabs(L.at(a, b, c)));
      }
  (void)chart;
  return out;
}

namespace {

struct Parameterization {
  // index of unknown for lowered component (a,b,c) plus a sign; -1 when the
  // component is forced to zero by the flavor symmetry
  std::vector<int> index;
  std::vector<double> sign;
  int count = 0;
  int n = 0;

  int idx(int a, int b, int c) const { return index[static_cast<std::size_t>((a * n + b) * n + c)]; }
  double sgn(int a, int b, int c) const { return sign[static_cast<std::size_t>((a * n + b) * n + c)]; }
};

Parameterization parameterize(ContorsionFlavor flavor, int n) {
  Parameterization p;
  p.n = n;
  p.index.assign(static_cast<std::size_t>(n) * n * n, -1);
  p.sign.assign(static_cast<std::size_t>(n) * n * n, 0.0);
  auto set = [&](int a, int b, int c, int id, double s) {
    p.index[static_cast<std::size_t>((a * n + b) * n + c)] = id;
    p.sign[static_cast<std::size_t>((a * n + b) * n + c)] = s;
  };
  int id = 0;
  if (flavor == ContorsionFlavor::Statistical) {
    for (int a = 0; a < n; ++a)
      for (int b = a; b < n; ++b)
        for (int c = b; c < n; ++c) {
          int trip[3] = {a, b, c};
          int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
          for (auto& pr : perms) set(trip[pr[0]], trip[pr[1]], trip[pr[2]], id, 1.0);
          ++id;
        }
  } else if (flavor == ContorsionFlavor::MetricCompatible) {
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = b + 1; c < n; ++c) {
          set(a, b, c, id, 1.0);
          set(a, c, b, id, -1.0);
          ++id;
        }
  } else {
    throw Unsupported("kernel computation supports statistical and metric-compatible flavors");
  }
  p.count = id;
  return p;
}

struct RowBuilder {
  const Parameterization& par;
  std::vector<double> rows;
  std::vector<double> rhs;
  std::vector<double> current;

  explicit RowBuilder(const Parameterization& p) : par(p) { current.assign(static_cast<std::size_t>(p.count), 0.0); }
  void add(int a, int b, int c, double coeff) {
    int id = par.idx(a, b, c);
    if (id < 0) return;
    current[static_cast<std::size_t>(id)] += coeff * par.sgn(a, b, c);
  }
  void commit(double r) {
    double mag = std::fabs(r);
    for (double v : current) mag = std::max(mag, std::fabs(v));
    if (mag > 1e-14) {
      rows.insert(rows.end(), current.begin(), current.end());
      rhs.push_back(r);
    }
    current.assign(current.size(), 0.0);
  }
};

}  // namespace

KernelResult critical_contorsion_kernel(const Chart& chart, const AdaptedFrameField& frame,
                                        const std::vector<std::vector<double>>& points,
                                        ContorsionFlavor flavor, double rank_tol) {
  if (points.empty()) throw BadInput("kernel computation needs sample points");
  const int n = chart.n;
  const int k = frame.split.k();
  Parameterization par = parameterize(flavor, n);
  RowBuilder rb(par);

  for (const auto& p : points) {
    ExtrinsicData ex = distributions::extrinsic_at(chart, frame, p.data());
    const FramePoint& fr = ex.fr;
    auto eps = [&](int i) { return fr.eps[static_cast<std::size_t>(i)]; };

    if (flavor == ContorsionFlavor::Statistical) {
      // trace projection, in-block relation, and cross-block vanishing
      for (int mu = 0; mu < k; ++mu) {
        for (int c = 0; c < n; ++c) {
          if (!fr.in_block(c, mu)) continue;
          for (int z = 0; z < n; ++z)
            if (!fr.in_block(z, mu)) rb.add(z, z, c, eps(z));
          rb.commit(0.0);
        }
        for (int xx = 0; xx < n; ++xx) {
          if (!fr.in_block(xx, mu)) continue;
          for (int u = xx; u < n; ++u) {
            if (!fr.in_block(u, mu)) continue;
            for (int c = 0; c < n; ++c) {
              if (fr.in_block(c, mu)) continue;
              rb.add(xx, u, c, 2.0);
              if (xx == u) {
                for (int z = 0; z < n; ++z)
                  if (!fr.in_block(z, mu)) rb.add(z, z, c, eps(xx) * eps(z));
              }
              rb.commit(0.0);
            }
          }
        }
      }
      for (int a = 0; a < n; ++a)
        for (int b = a; b < n; ++b)
          for (int c = b; c < n; ++c) {
            int ba = fr.block_of(a), bb = fr.block_of(b), bc = fr.block_of(c);
            if (ba == bb || bb == bc || ba == bc) continue;
            rb.add(a, b, c, 1.0);
            rb.commit(0.0);
          }
    } else {
      // metric-compatible: the critical system with I* = -I substituted
      double umb = 0.0;
      for (int mu = 0; mu < k; ++mu) {
        int nm = fr.dims[static_cast<std::size_t>(mu)];
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) {
            if (!fr.in_block(a, mu) || !fr.in_block(b, mu)) continue;
            double gab = (a == b) ? eps(a) : 0.0;
            for (int c = 0; c < n; ++c)
              umb = std::max(umb, std::fabs(ex.h[static_cast<std::size_t>(mu)].at(a, b, c) -
                                            gab / nm * ex.H[static_cast<std::size_t>(mu)][static_cast<std::size_t>(c)]));
          }
      }
      if (umb > 1e-7) {
        KernelResult res;
        res.dimension = -1;
        res.unknowns = par.count;
        res.infeasibility = umb;
        return res;
      }

      for (int mu = 0; mu < k; ++mu) {
        int nm = fr.dims[static_cast<std::size_t>(mu)];
        if (nm > 1) {
          for (int c = 0; c < n; ++c) {
            if (!fr.in_block(c, mu)) continue;
            double htc = eps(c) * ex.H_tilde[static_cast<std::size_t>(mu)][static_cast<std::size_t>(c)];
            // P tr_bot I* = Ht : sum eps_i L(i,c,i) = <Ht, E_c>
            for (int i = 0; i < n; ++i)
              if (!fr.in_block(i, mu)) rb.add(i, c, i, eps(i));
            rb.commit(htc);
            // P tr_bot I = -Ht
            for (int i = 0; i < n; ++i)
              if (!fr.in_block(i, mu)) rb.add(i, i, c, eps(i));
            rb.commit(-htc);
          }
        }
        for (int u = 0; u < n; ++u) {
          if (fr.in_block(u, mu)) continue;
          for (int a = 0; a < n; ++a) {
            if (!fr.in_block(a, mu)) continue;
            for (int b = 0; b < n; ++b) {
              if (!fr.in_block(b, mu)) continue;
              double tv = eps(u) * ex.T[static_cast<std::size_t>(mu)].at(a, b, u);
              // (b): L(u,a,b) - L(u,b,a) = 2 <T(a,b), u>
              if (b >= a) {
                rb.add(u, a, b, 1.0);
                rb.add(u, b, a, -1.0);
                rb.commit(2.0 * tv);
              }
              // (c): L(u,a,b) + L(u,b,a) = g_ab tr-term; with I* = -I the
              // trace term is sum eps_z (L(z,z,u) + L(z,u,z))
              if (b >= a) {
                rb.add(u, a, b, 1.0);
                rb.add(u, b, a, 1.0);
                double gab = (a == b) ? eps(a) : 0.0;
                if (gab != 0.0) {
                  for (int z = 0; z < n; ++z) {
                    if (fr.in_block(z, mu)) continue;
                    rb.add(z, z, u, -gab * eps(z));
                    rb.add(z, u, z, -gab * eps(z));
                  }
                }
                rb.commit(0.0);
              }
              // (e): L(a,b,u) + L(b,u,a) = -2 <T(a,b), u>
              rb.add(a, b, u, 1.0);
              rb.add(b, u, a, 1.0);
              rb.commit(-2.0 * tv);
            }
          }
        }
        // (d): sum_z eps_z (L(z,z,c) - L(z,c,z)) = (2 - 2/n_mu) <H, E_c>, c perp
        for (int c = 0; c < n; ++c) {
          if (fr.in_block(c, mu)) continue;
          for (int z = 0; z < n; ++z) {
            if (fr.in_block(z, mu)) continue;
            rb.add(z, z, c, eps(z));
            rb.add(z, c, z, -eps(z));
          }
          rb.commit((2.0 - 2.0 / nm) * eps(c) * ex.H[static_cast<std::size_t>(mu)][static_cast<std::size_t>(c)]);
        }
      }
      // cross-distribution identity
      for (int a = 0; a < n; ++a)
        for (int y = 0; y < n; ++y)
          for (int z = 0; z < n; ++z) {
            int ba = fr.block_of(a), by = fr.block_of(y), bz = fr.block_of(z);
            if (ba == by || by == bz || ba == bz) continue;
            rb.add(y, z, a, 1.0);
            rb.add(z, a, y, 1.0);
            rb.commit(0.0);
          }
    }
  }

  const int m = static_cast<int>(rb.rhs.size());
  KernelResult res;
  res.unknowns = par.count;
  if (m == 0) {
    res.dimension = par.count;
    for (int j = 0; j < par.count; ++j) {
      std::vector<double> e(static_cast<std::size_t>(par.count), 0.0);
      e[static_cast<std::size_t>(j)] = 1.0;
      res.basis.push_back(std::move(e));
    }
    res.particular.assign(static_cast<std::size_t>(par.count), 0.0);
    return res;
  }
  double resid = 0.0;
  res.particular = linalg::lstsq(rb.rows, rb.rhs, m, par.count, 1e-12, &resid);
  double scale = 0.0;
  for (double v : rb.rhs) scale = std::max(scale, std::fabs(v));
  res.infeasibility = resid;
  if (resid > 1e-6 * std::max(1.0, scale)) {
    res.dimension = -1;
    return res;
  }
  res.basis = linalg::nullspace(rb.rows, m, par.count, rank_tol);
  res.dimension = static_cast<int>(res.basis.size());
  return res;
}

}  // namespace mixedcurv::el_contorsion
