#include "mixedcurv/special_geometries.hpp"

#include <cmath>

#include "mixedcurv/contorsion.hpp"
#include "mixedcurv/el_contorsion.hpp"
#include "mixedcurv/errors.hpp"

namespace mixedcurv::special_geometries {

namespace {

double vec_comp(const FramePoint& fr, const std::vector<double>& v, int c) {
  return fr.eps[static_cast<std::size_t>(c)] * v[static_cast<std::size_t>(c)];
}

std::vector<double> project_block(const FramePoint& fr, const std::vector<double>& v, int mu, bool complement) {
  std::vector<double> out(static_cast<std::size_t>(fr.n), 0.0);
  for (int c = 0; c < fr.n; ++c) {
    bool in = fr.in_block(c, mu);
    if (complement ? !in : in) out[static_cast<std::size_t>(c)] = v[static_cast<std::size_t>(c)];
  }
  return out;
}

double max_abs(const Nd& t) {
  double m = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) m = std::max(m, std::fabs(t[i]));
  return m;
}

// frame components of U at a point
std::vector<double> u_frame(const FramePoint& fr, const VectorFieldFn& u, const double* x) {
  std::vector<double> uc(static_cast<std::size_t>(fr.n));
  u(x, uc.data());
  std::vector<double> uf(static_cast<std::size_t>(fr.n));
  for (int c = 0; c < fr.n; ++c) uf[static_cast<std::size_t>(c)] = fr.frame_comp(uc.data(), c);
  return uf;
}

}  // namespace

std::vector<double> semi_symmetric_critical_residual(const Chart& chart,
                                                     const AdaptedFrameField& frame, const double* x,
                                                     const VectorFieldFn& u) {
  ExtrinsicData ex = distributions::extrinsic_at(chart, frame, x);
  const FramePoint& fr = ex.fr;
  const int n = fr.n;
  std::vector<double> uf = u_frame(fr, u, x);
  std::vector<double> out(static_cast<std::size_t>(n), 0.0);
  for (int mu = 0; mu < fr.k; ++mu) {
    double nm = fr.dims[static_cast<std::size_t>(mu)];
    double np = n - nm;
    std::vector<double> pu = project_block(fr, uf, mu, false);
    std::vector<double> ppu = project_block(fr, uf, mu, true);
    for (int c = 0; c < n; ++c) {
      double v = (nm - np) * (ex.H[static_cast<std::size_t>(mu)][static_cast<std::size_t>(c)] -
                              ex.H_tilde[static_cast<std::size_t>(mu)][static_cast<std::size_t>(c)]);
      v += 2.0 * nm * (np - 1.0) * ppu[static_cast<std::size_t>(c)];
      v += 2.0 * np * (nm - 1.0) * pu[static_cast<std::size_t>(c)];
      out[static_cast<std::size_t>(c)] += v;
    }
  }
  return out;
}

ELReport semi_symmetric_metric_el_residual(const Chart& chart, const AdaptedFrameField& frame,
                                           const std::vector<std::vector<double>>& sample_points,
                                           const VectorFieldFn& u, el_metric::LambdaMode mode,
                                           double lambda_given, double tol) {
  if (sample_points.empty()) throw BadInput("need sample points");
  const int k = frame.split.k();
  const int n = chart.n;

  // divergence helpers for the projected U fields
  auto div_proj = [&](const double* x, int mu, bool complement) {
    VectorFieldFn f = [&chart, &frame, &u, mu, complement](const double* p, double* out) {
      FramePoint fr = frame.at(p);
      std::vector<double> uf = u_frame(fr, u, p);
      std::vector<double> pr = project_block(fr, uf, mu, complement);
      fr.to_coord(pr.data(), out);
    };
    return geometry::divergence_at(f, chart, x);
  };

  struct PD {
    std::vector<Nd> base;
    FramePoint fr;
  };
  std::vector<PD> pts;
  for (const auto& p : sample_points) {
    PD pd;
    pd.fr = frame.at(p.data());
    const FramePoint& fr = pd.fr;
    double smix = functionals::mixed_scalar_at(chart, frame, p.data(), nullptr);

    // Div of sum_nu (-n_nu_perp P_nu U - n_nu P_nu_perp U + H_nu + Ht_nu)
    VectorFieldFn zf = [&chart, &frame, &u, k, n](const double* q, double* out) {
      ExtrinsicData e2 = distributions::extrinsic_at(chart, frame, q);
      const FramePoint& f2 = e2.fr;
      std::vector<double> uf = u_frame(f2, u, q);
      std::vector<double> acc(static_cast<std::size_t>(n), 0.0);
      for (int nu = 0; nu < k; ++nu) {
        double nn = f2.dims[static_cast<std::size_t>(nu)];
        double np = n - nn;
        std::vector<double> pu = project_block(f2, uf, nu, false);
        std::vector<double> ppu = project_block(f2, uf, nu, true);
        for (int c = 0; c < n; ++c) {
          acc[static_cast<std::size_t>(c)] += -np * pu[static_cast<std::size_t>(c)] - nn * ppu[static_cast<std::size_t>(c)] +
                                              e2.H[static_cast<std::size_t>(nu)][static_cast<std::size_t>(c)] +
                                              e2.H_tilde[static_cast<std::size_t>(nu)][static_cast<std::size_t>(c)];
        }
      }
      f2.to_coord(acc.data(), out);
    };
    double divz = geometry::divergence_at(zf, chart, p.data());

    std::vector<double> uf = u_frame(fr, u, p.data());
    for (int mu = 0; mu < k; ++mu) {
      double nm = fr.dims[static_cast<std::size_t>(mu)];
      double np = n - nm;
      Nd el = el_metric::delta_q_mu_at(chart, frame, p.data(), mu);
      // -(1/2)(n_mu_perp (n_mu - 1) + sum_nu n_nu (n_nu_perp - 1)) PU^flat x PU^flat
      double coef = np * (nm - 1.0);
      for (int nu = 0; nu < k; ++nu) {
        if (nu == mu) continue;
        double nn = fr.dims[static_cast<std::size_t>(nu)];
        coef += nn * ((n - nn) - 1.0);
      }
      std::vector<double> pu = project_block(fr, uf, mu, false);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          if (!fr.in_block(a, mu) || !fr.in_block(b, mu)) continue;
          el.at(a, b) -= 0.5 * coef * vec_comp(fr, pu, a) * vec_comp(fr, pu, b);
        }
      // +(1/4) Div((n_mu - n_mu_perp) P_perp U + sum_nu (n_nu_perp - n_nu) P_nu U) g_mu
      double divterm = (nm - np) * div_proj(p.data(), mu, true);
      for (int nu = 0; nu < k; ++nu) {
        if (nu == mu) continue;
        double nn = fr.dims[static_cast<std::size_t>(nu)];
        divterm += ((n - nn) - nn) * div_proj(p.data(), nu, false);
      }
      double c0 = 0.25 * divterm + smix - 0.5 * divz;
      for (int a = 0; a < n; ++a)
        if (fr.in_block(a, mu)) el.at(a, a) += c0 * fr.eps[static_cast<std::size_t>(a)];
      pd.base.push_back(el);
    }
    pts.push_back(std::move(pd));
  }

  double lambda = lambda_given;
  if (mode == el_metric::LambdaMode::Fit) {
    double num = 0.0, den = 0.0;
    for (const auto& pd : pts)
      for (int mu = 0; mu < k; ++mu) {
        double tr = 0.0;
        for (int a = 0; a < n; ++a)
          if (pd.fr.in_block(a, mu)) tr += pd.fr.eps[static_cast<std::size_t>(a)] * pd.base[static_cast<std::size_t>(mu)].at(a, a);
        double nm = pd.fr.dims[static_cast<std::size_t>(mu)];
        num += nm * tr;
        den += nm * nm;
      }
    lambda = den > 0 ? -num / den : 0.0;
  }

  ELReport rep;
  rep.lambda = lambda;
  rep.tol = tol;
  rep.residual_per_block.assign(static_cast<std::size_t>(k), 0.0);
  for (std::size_t pi = 0; pi < pts.size(); ++pi) {
    for (int mu = 0; mu < k; ++mu) {
      Nd el = pts[pi].base[static_cast<std::size_t>(mu)];
      for (int a = 0; a < n; ++a)
        if (pts[pi].fr.in_block(a, mu)) el.at(a, a) += lambda * pts[pi].fr.eps[static_cast<std::size_t>(a)];
      double r = max_abs(el);
      rep.residual_per_block[static_cast<std::size_t>(mu)] = std::max(rep.residual_per_block[static_cast<std::size_t>(mu)], r);
      if (r > rep.max_residual) {
        rep.max_residual = r;
        rep.worst_mu = mu;
        rep.worst_point = sample_points[pi];
      }
    }
  }
  rep.pass = rep.max_residual < tol;
  return rep;
}

ELReport twisted_el_residual(const Chart& chart, const AdaptedFrameField& frame,
                             const std::vector<std::vector<double>>& sample_points,
                             const ContorsionField* I, TwistedCase which, double tol,
                             double flag_tol) {
  if (sample_points.empty()) throw BadInput("need sample points");
  StructureFlags flags = distributions::structure_flags(chart, frame, sample_points, flag_tol);
  const int k = frame.split.k();
  for (int mu = 0; mu < k; ++mu)
    for (int nu = 0; nu < k; ++nu) {
      if (mu == nu) continue;
      if (!flags.mixed_totally_geodesic[static_cast<std::size_t>(mu)][static_cast<std::size_t>(nu)] ||
          !flags.mixed_integrable[static_cast<std::size_t>(mu)][static_cast<std::size_t>(nu)]) {
        throw PreconditionFailed("blocks " + std::to_string(mu) + "," + std::to_string(nu) +
                                 " are not mixed totally geodesic / mixed integrable (residual " +
                                 std::to_string(std::max(
                                     flags.mixed_tg_w[static_cast<std::size_t>(mu)][static_cast<std::size_t>(nu)].max_residual,
                                     flags.mixed_int_w[static_cast<std::size_t>(mu)][static_cast<std::size_t>(nu)].max_residual)) +
                                 ")");
      }
    }

  const int n = chart.n;
  ELReport rep;
  rep.tol = tol;
  rep.residual_per_block.assign(static_cast<std::size_t>(k), 0.0);

  struct Row {
    double coef = 0.0;  // coefficient of lambda
    double val = 0.0;   // lambda-free part
    int mu = 0;
    std::size_t point = 0;
  };
  std::vector<Row> rows;          // scalar trace rows for the lambda fit
  std::vector<std::vector<Nd>> tensors(sample_points.size());  // lambda-free tensors per point/mu
  std::vector<std::vector<double>> tensor_lambda_coef(sample_points.size());

  const double m = static_cast<double>(n);

  for (std::size_t pi = 0; pi < sample_points.size(); ++pi) {
    const double* x = sample_points[pi].data();
    FramePoint fr = frame.at(x);
    ExtrinsicData ex = distributions::extrinsic_at(chart, frame, x);
    Nd ic;
    Nd L;
    if (I) {
      ic = I->at(x, fr);
      L = contorsion::lowered(ic, fr);
    }

    tensors[pi].assign(static_cast<std::size_t>(k), Nd({n, n}));
    tensor_lambda_coef[pi].assign(static_cast<std::size_t>(k), 0.0);

    if (which == TwistedCase::General) {
      double sbar = functionals::mixed_scalar_at(chart, frame, x, I);
      for (int mu = 0; mu < k; ++mu) {
        double nm = fr.dims[static_cast<std::size_t>(mu)];
        // Div((1 - 2/n_mu) H_mu - Ht_mu)
        VectorFieldFn f = [&chart, &frame, mu, nm, n](const double* p, double* out) {
          ExtrinsicData e2 = distributions::extrinsic_at(chart, frame, p);
          std::vector<double> v(static_cast<std::size_t>(n));
          for (int c = 0; c < n; ++c)
            v[static_cast<std::size_t>(c)] = (1.0 - 2.0 / nm) * e2.H[static_cast<std::size_t>(mu)][static_cast<std::size_t>(c)] -
                                             e2.H_tilde[static_cast<std::size_t>(mu)][static_cast<std::size_t>(c)];
          e2.fr.to_coord(v.data(), out);
        };
        double divv = geometry::divergence_at(f, chart, x);
        Nd el({n, n});
        double c0 = sbar + divv;
        for (int a = 0; a < n; ++a)
          if (fr.in_block(a, mu)) el.at(a, a) += c0 * fr.eps[static_cast<std::size_t>(a)];
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) {
            if (!fr.in_block(a, mu) || !fr.in_block(b, mu)) continue;
            el.at(a, b) -= vec_comp(fr, ex.H_tilde[static_cast<std::size_t>(mu)], a) *
                           vec_comp(fr, ex.H_tilde[static_cast<std::size_t>(mu)], b);
            if (I) {
              double iv = 0.0;
              for (int z = 0; z < n; ++z)
                iv += ex.H_tilde[static_cast<std::size_t>(mu)][static_cast<std::size_t>(z)] * L.at(z, a, b);
              el.at(a, b) += iv;
            }
            for (int nu = 0; nu < k; ++nu) {
              if (nu == mu) continue;
              double nn = fr.dims[static_cast<std::size_t>(nu)];
              std::vector<double> ph = project_block(fr, ex.H[static_cast<std::size_t>(nu)], mu, false);
              el.at(a, b) += (2.0 / nn - 1.0) * vec_comp(fr, ph, a) * vec_comp(fr, ph, b);
            }
          }
        tensors[pi][static_cast<std::size_t>(mu)] = el;
        tensor_lambda_coef[pi][static_cast<std::size_t>(mu)] = 1.0;
        double tr = 0.0;
        for (int a = 0; a < n; ++a)
          if (fr.in_block(a, mu)) tr += fr.eps[static_cast<std::size_t>(a)] * el.at(a, a);
        rows.push_back({nm, tr, mu, pi});
      }
    } else if (which == TwistedCase::MixedDims) {
      for (int mu = 0; mu < k; ++mu) {
        double nm = fr.dims[static_cast<std::size_t>(mu)];
        if (nm > 1.0) {
          Nd el({n, n});
          for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
              if (!fr.in_block(a, mu) || !fr.in_block(b, mu)) continue;
              for (int nu = 0; nu < k; ++nu) {
                if (fr.dims[static_cast<std::size_t>(nu)] != 1 || nu == mu) continue;
                std::vector<double> ph = project_block(fr, ex.H[static_cast<std::size_t>(nu)], mu, false);
                el.at(a, b) += vec_comp(fr, ph, a) * vec_comp(fr, ph, b);
              }
            }
          // + (m lambda / (2 - m)) g_mu
          tensors[pi][static_cast<std::size_t>(mu)] = el;
          tensor_lambda_coef[pi][static_cast<std::size_t>(mu)] = m / (2.0 - m);
          double tr = 0.0;
          for (int a = 0; a < n; ++a)
            if (fr.in_block(a, mu)) tr += fr.eps[static_cast<std::size_t>(a)] * el.at(a, a);
          rows.push_back({nm * m / (2.0 - m), tr, mu, pi});
        } else {
          // S_{D_mu, D_mu^perp} via the divergence form, minus 2 lambda/(2-m)
          VectorFieldFn f = [&chart, &frame, mu, n](const double* p, double* out) {
            ExtrinsicData e2 = distributions::extrinsic_at(chart, frame, p);
            std::vector<double> v(static_cast<std::size_t>(n));
            for (int c = 0; c < n; ++c)
              v[static_cast<std::size_t>(c)] = e2.H[static_cast<std::size_t>(mu)][static_cast<std::size_t>(c)] +
                                               e2.H_tilde[static_cast<std::size_t>(mu)][static_cast<std::size_t>(c)];
            e2.fr.to_coord(v.data(), out);
          };
          double divv = geometry::divergence_at(f, chart, x);
          double ht2 = 0.0;
          for (int c = 0; c < n; ++c)
            ht2 += fr.eps[static_cast<std::size_t>(c)] * ex.H_tilde[static_cast<std::size_t>(mu)][static_cast<std::size_t>(c)] *
                   ex.H_tilde[static_cast<std::size_t>(mu)][static_cast<std::size_t>(c)];
          double sum = 0.0;
          for (int nu = 0; nu < k; ++nu) {
            if (fr.dims[static_cast<std::size_t>(nu)] != 1) continue;
            std::vector<double> ph = project_block(fr, ex.H[static_cast<std::size_t>(nu)], mu, false);
            for (int c = 0; c < n; ++c)
              sum += fr.eps[static_cast<std::size_t>(c)] * ph[static_cast<std::size_t>(c)] * ph[static_cast<std::size_t>(c)];
          }
          double smu = divv + ht2 - sum;
          Nd el({n, n});
          int off = fr.offset[static_cast<std::size_t>(mu)];
          el.at(off, off) = smu;
          tensors[pi][static_cast<std::size_t>(mu)] = el;
          tensor_lambda_coef[pi][static_cast<std::size_t>(mu)] = -2.0 / (2.0 - m);
          rows.push_back({-2.0 / (2.0 - m), smu, mu, pi});
        }
      }
    } else {  // AllOneDim
      for (int mu = 0; mu < k; ++mu)
        if (fr.dims[static_cast<std::size_t>(mu)] != 1) throw PreconditionFailed("all blocks must be one-dimensional");
      Nd ric = geometry::ricci_at(chart, x);
      for (int mu = 0; mu < k; ++mu) {
        int off = fr.offset[static_cast<std::size_t>(mu)];
        double rmm = 0.0;
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j)
            rmm += fr.E[static_cast<std::size_t>(off) * n + i] * fr.E[static_cast<std::size_t>(off) * n + j] * ric.at(i, j);
        Nd el({n, n});
        el.at(off, off) = rmm;
        tensors[pi][static_cast<std::size_t>(mu)] = el;
        tensor_lambda_coef[pi][static_cast<std::size_t>(mu)] = 2.0 / (k - 2.0);
        rows.push_back({2.0 / (k - 2.0), rmm, mu, pi});
      }
      if (I) {
        Nd icl = contorsion::lowered(I->at(x, fr), fr);
        double imax = max_abs(icl);
        // contorsion must vanish in this case; fold into the residual
        Nd el({n, n});
        el.at(0, 0) = imax;
        tensors[pi][0] += el;
      }
    }
  }

  double num = 0.0, den = 0.0;
  for (const auto& r : rows) {
    num += r.coef * r.val;
    den += r.coef * r.coef;
  }
  double lambda = den > 0 ? -num / den : 0.0;
  rep.lambda = lambda;

  for (std::size_t pi = 0; pi < sample_points.size(); ++pi) {
    FramePoint fr = frame.at(sample_points[pi].data());
    for (int mu = 0; mu < k; ++mu) {
      Nd el = tensors[pi][static_cast<std::size_t>(mu)];
      double lc = tensor_lambda_coef[pi][static_cast<std::size_t>(mu)];
      for (int a = 0; a < n; ++a)
        if (fr.in_block(a, mu)) el.at(a, a) += lc * lambda * fr.eps[static_cast<std::size_t>(a)];
      double r = max_abs(el);
      rep.residual_per_block[static_cast<std::size_t>(mu)] = std::max(rep.residual_per_block[static_cast<std::size_t>(mu)], r);
      if (r > rep.max_residual) {
        rep.max_residual = r;
        rep.worst_mu = mu;
        rep.worst_point = sample_points[pi];
      }
    }
  }
  rep.pass = rep.max_residual < tol;
  return rep;
}

ELReport stat_restricted_metric_el_residual(const Chart& chart, const AdaptedFrameField& frame,
                                            const std::vector<std::vector<double>>& sample_points,
                                            const ContorsionField& I, double tol) {
  if (I.flavor != ContorsionFlavor::Statistical) throw FlavorViolation("restricted theory needs a statistical contorsion");
  // hypotheses: the contorsion must be critical among statistical connections
  for (const auto& p : sample_points) {
    auto st = el_contorsion::stat_el_residuals_at(chart, frame, p.data(), I);
    if (st.max_all() > 1e-7)
      throw PreconditionFailed("contorsion is not critical among its family (residual " +
                               std::to_string(st.max_all()) + ")");
  }

  const int k = frame.split.k();
  const int n = chart.n;
  struct PD {
    std::vector<Nd> base;
    FramePoint fr;
  };
  std::vector<PD> pts;
  for (const auto& p : sample_points) {
    const double* x = p.data();
    PD pd;
    pd.fr = frame.at(x);
    const FramePoint& fr = pd.fr;
    ExtrinsicData ex = distributions::extrinsic_at(chart, frame, x);
    Nd ic = I.at(x, fr);
    Nd L = contorsion::lowered(ic, fr);
    double sbar = functionals::mixed_scalar_at(chart, frame, x, &I);
    VectorFieldFn hf = [&chart, &frame, k, n](const double* q, double* out) {
      ExtrinsicData e2 = distributions::extrinsic_at(chart, frame, q);
      std::vector<double> v(static_cast<std::size_t>(n), 0.0);
      for (int nu = 0; nu < k; ++nu)
        for (int c = 0; c < n; ++c)
          v[static_cast<std::size_t>(c)] += e2.H[static_cast<std::size_t>(nu)][static_cast<std::size_t>(c)] +
                                            e2.H_tilde[static_cast<std::size_t>(nu)][static_cast<std::size_t>(c)];
      e2.fr.to_coord(v.data(), out);
    };
    double divh = geometry::divergence_at(hf, chart, x);

    for (int mu = 0; mu < k; ++mu) {
      Nd el({n, n});
      auto trb_mu = contorsion::trace_bottom(ic, fr, mu);
      std::vector<double> ppu = project_block(fr, trb_mu, mu, true);  // P_perp tr_bot
      double ppu2 = 0.0;
      for (int c = 0; c < n; ++c)
        ppu2 += fr.eps[static_cast<std::size_t>(c)] * ppu[static_cast<std::size_t>(c)] * ppu[static_cast<std::size_t>(c)];

      // scalar coefficients multiplying g_mu
      double gcoef = -0.5 * ppu2;
      {
        double acc = 0.0;
        for (int nu = 0; nu < k; ++nu) {
          if (nu == mu) continue;
          std::vector<double> ph = project_block(fr, ex.H[static_cast<std::size_t>(nu)], mu, true);
          for (int c = 0; c < n; ++c)
            acc += fr.eps[static_cast<std::size_t>(c)] *
                   (ph[static_cast<std::size_t>(c)] - ex.H_tilde[static_cast<std::size_t>(nu)][static_cast<std::size_t>(c)]) *
                   trb_mu[static_cast<std::size_t>(c)];
        }
        gcoef += 0.5 * acc;
        double hm = 0.0;
        for (int c = 0; c < n; ++c)
          hm += fr.eps[static_cast<std::size_t>(c)] * ex.H[static_cast<std::size_t>(mu)][static_cast<std::size_t>(c)] *
                trb_mu[static_cast<std::size_t>(c)];
        gcoef -= 0.5 * hm;
      }

      for (int a = 0; a < n; ++a) {
        if (!fr.in_block(a, mu)) continue;
        for (int b = 0; b < n; ++b) {
          if (!fr.in_block(b, mu)) continue;
          double v = 0.0;
          for (int nu = 0; nu < k; ++nu) {
            if (nu == mu) continue;
            double nn = fr.dims[static_cast<std::size_t>(nu)];
            auto trb_nu = contorsion::trace_bottom(ic, fr, nu);
            auto trt_nu = contorsion::trace_top(ic, fr, nu);
            std::vector<double> ptb = project_block(fr, trb_nu, mu, false);
            std::vector<double> ptt = project_block(fr, trt_nu, mu, false);
            std::vector<double> ph = project_block(fr, ex.H[static_cast<std::size_t>(nu)], mu, false);
            v += 0.5 * nn * vec_comp(fr, ptb, a) * vec_comp(fr, ptb, b);
            v += -3.0 * 0.5 * (vec_comp(fr, ph, a) * vec_comp(fr, ptb, b) + vec_comp(fr, ph, b) * vec_comp(fr, ptb, a));
            v += 0.5 * (vec_comp(fr, ptt, a) * vec_comp(fr, ph, b) + vec_comp(fr, ptt, b) * vec_comp(fr, ph, a));
          }
          // 2 <h_mu, P_perp tr_bot I> as a (0,2) on the block
          double hv = 0.0;
          for (int c = 0; c < n; ++c)
            hv += fr.eps[static_cast<std::size_t>(c)] * ex.h[static_cast<std::size_t>(mu)].at(a, b, c) * ppu[static_cast<std::size_t>(c)];
          v += 2.0 * hv;
          // 2 I^flat_{Ht_mu}
          double iv = 0.0;
          for (int z = 0; z < n; ++z)
            iv += ex.H_tilde[static_cast<std::size_t>(mu)][static_cast<std::size_t>(z)] * L.at(z, a, b);
          v += 2.0 * iv;
          // -Sym((P tr_top I)^flat x Ht^flat)
          auto trt_mu = contorsion::trace_top(ic, fr, mu);
          std::vector<double> ptt_mu = project_block(fr, trt_mu, mu, false);
          v -= 0.5 * (vec_comp(fr, ptt_mu, a) * vec_comp(fr, ex.H_tilde[static_cast<std::size_t>(mu)], b) +
                      vec_comp(fr, ptt_mu, b) * vec_comp(fr, ex.H_tilde[static_cast<std::size_t>(mu)], a));
          double gab = (a == b) ? fr.eps[static_cast<std::size_t>(a)] : 0.0;
          v += gcoef * gab;
          el.at(a, b) = v;
        }
      }

      // + 2 deltaQ_mu + 2 (Sbar - 1/2 Div sum(H + Ht)) g_mu ; lambda joins later
      Nd dq = el_metric::delta_q_mu_at(chart, frame, x, mu);
      dq *= 2.0;
      el += dq;
      double c0 = 2.0 * (sbar - 0.5 * divh);
      for (int a = 0; a < n; ++a)
        if (fr.in_block(a, mu)) el.at(a, a) += c0 * fr.eps[static_cast<std::size_t>(a)];
      pd.base.push_back(el);
    }
    pts.push_back(std::move(pd));
  }

  // fit lambda: + 2 lambda g_mu
  double num = 0.0, den = 0.0;
  for (const auto& pd : pts)
    for (int mu = 0; mu < k; ++mu) {
      double tr = 0.0;
      for (int a = 0; a < n; ++a)
        if (pd.fr.in_block(a, mu)) tr += pd.fr.eps[static_cast<std::size_t>(a)] * pd.base[static_cast<std::size_t>(mu)].at(a, a);
      double nm = pd.fr.dims[static_cast<std::size_t>(mu)];
      num += 2.0 * nm * tr;
      den += 4.0 * nm * nm;
    }
  double lambda = den > 0 ? -num / den : 0.0;

  ELReport rep;
  rep.lambda = lambda;
  rep.tol = tol;
  rep.residual_per_block.assign(static_cast<std::size_t>(k), 0.0);
  for (std::size_t pi = 0; pi < pts.size(); ++pi) {
    for (int mu = 0; mu < k; ++mu) {
      Nd el = pts[pi].base[static_cast<std::size_t>(mu)];
      for (int a = 0; a < n; ++a)
        if (pts[pi].fr.in_block(a, mu)) el.at(a, a) += 2.0 * lambda * pts[pi].fr.eps[static_cast<std::size_t>(a)];
      double r = max_abs(el);
      rep.residual_per_block[static_cast<std::size_t>(mu)] = std::max(rep.residual_per_block[static_cast<std::size_t>(mu)], r);
      if (r > rep.max_residual) {
        rep.max_residual = r;
        rep.worst_mu = mu;
        rep.worst_point = sample_points[pi];
      }
    }
  }
  rep.pass = rep.max_residual < tol;
  return rep;
}

CheckReport sasaki_structure_check(const Chart& chart, const AdaptedFrameField& frame,
                                   const SasakiStructure& s,
                                   const std::vector<std::vector<double>>& sample_points, double tol) {
  CheckReport rep;
  const int n = chart.n;
  double r_nabla = 0.0, r_sq = 0.0, r_perm = 0.0;
  for (const auto& p : sample_points) {
    ExtrinsicData ex = distributions::extrinsic_at(chart, frame, p.data());
    const FramePoint& fr = ex.fr;
    for (int a = 0; a < 3; ++a) {
      // nabla_Y xi_a + Ttilde#_{xi_a} Y = 0 over the frame
      Nd grad = geometry::covariant_derivative_vector(s.reeb[static_cast<std::size_t>(a)], chart, p.data());
      Nd op = ex.tsharp_op_perp(a, fr.offset[static_cast<std::size_t>(a)]);
      for (int y = 0; y < n; ++y) {
        // coordinate comps of nabla_{E_y} xi_a
        std::vector<double> v(static_cast<std::size_t>(n), 0.0);
        for (int l = 0; l < n; ++l) {
          double acc = 0.0;
          for (int i = 0; i < n; ++i) acc += fr.E[static_cast<std::size_t>(y) * n + i] * grad.at(i, l);
          v[static_cast<std::size_t>(l)] = acc;
        }
        for (int c = 0; c < n; ++c) {
          double lhs = fr.frame_comp(v.data(), c);
          double rhs = -op.at(y, c);
          r_nabla = std::max(r_nabla, std::fabs(lhs - rhs));
        }
      }
      // (Ttilde#)^2 = -id on the complement
      for (int y = 0; y < n; ++y) {
        if (fr.in_block(y, a)) continue;
        for (int c = 0; c < n; ++c) {
          if (fr.in_block(c, a)) continue;
          double acc = 0.0;
          for (int z = 0; z < n; ++z) acc += op.at(y, z) * op.at(z, c);
          double want = (y == c) ? -1.0 : 0.0;
          r_sq = std::max(r_sq, std::fabs(acc - want));
        }
      }
    }
    // Ttilde#_{xi_a} xi_b = +- xi_c for permutations of (1,2,3)
    for (int a = 0; a < 3; ++a) {
      Nd op = ex.tsharp_op_perp(a, fr.offset[static_cast<std::size_t>(a)]);
      int b = (a + 1) % 3, c = (a + 2) % 3;
      int gb = fr.offset[static_cast<std::size_t>(b)], gc = fr.offset[static_cast<std::size_t>(c)];
      double v = std::fabs(op.at(gb, gc));
      r_perm = std::max(r_perm, std::fabs(v - 1.0));
    }
  }
  rep.add("reeb_covariant_derivative", r_nabla, 0.0, tol);
  rep.add("twist_square_minus_id", r_sq, 0.0, tol);
  rep.add("reeb_permutation", r_perm, 0.0, tol);
  return rep;
}

PhiChiTensors sasaki_tensors_at(const Chart& chart, const AdaptedFrameField& frame,
                                const SasakiStructure& s, const double* x, const ContorsionField* I) {
  (void)s;
  ExtrinsicData ex = distributions::extrinsic_at(chart, frame, x);
  const FramePoint& fr = ex.fr;
  const int n = fr.n;
  const int k = fr.k;
  Nd ic({n, n, n});
  if (I) ic = I->at(x, fr);
  Nd L = contorsion::lowered(ic, fr);

  PhiChiTensors out;
  out.phi.assign(static_cast<std::size_t>(k), Nd({n, n, n}));
  out.phi_top.assign(static_cast<std::size_t>(k), Nd({n, n, n}));
  out.phi_tilde.assign(static_cast<std::size_t>(k), Nd({n, n, n}));
  out.phi_tilde_perp.assign(static_cast<std::size_t>(k), Nd({n, n, n}));
  out.chi.assign(static_cast<std::size_t>(k), Nd({n, n}));
  out.chi_tilde.assign(static_cast<std::size_t>(k), Nd({n, n}));

  for (int nu = 0; nu < k; ++nu) {
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c) {
          if (!fr.in_block(a, nu) && !fr.in_block(b, nu)) {
            double v = ic.at(a, b, c) + ic.at(b, a, c);
            out.phi[static_cast<std::size_t>(nu)].at(a, b, c) = v;
            if (fr.in_block(c, nu)) out.phi_top[static_cast<std::size_t>(nu)].at(a, b, c) = v;
          }
          if (fr.in_block(a, nu) && fr.in_block(b, nu)) {
            double v = ic.at(a, b, c) + ic.at(b, a, c);
            out.phi_tilde[static_cast<std::size_t>(nu)].at(a, b, c) = v;
            if (!fr.in_block(c, nu)) out.phi_tilde_perp[static_cast<std::size_t>(nu)].at(a, b, c) = v;
          }
        }
    for (int xx = 0; xx < n; ++xx)
      for (int yy = 0; yy < n; ++yy) {
        double acc = 0.0, acc_t = 0.0;
        for (int a = 0; a < n; ++a) {
          for (int j = 0; j < n; ++j) {
            if (fr.in_block(a, nu) && !fr.in_block(j, nu)) {
              // chi: <X, I_{E_j} E_a> <Y, Ttilde#_{E_a} E_j>
              Nd op = ex.tsharp_op_perp(nu, a);
              double f1 = L.at(j, a, xx);
              double f2 = fr.eps[static_cast<std::size_t>(yy)] * op.at(j, yy);
              double g1 = L.at(j, a, yy);
              double g2 = fr.eps[static_cast<std::size_t>(xx)] * op.at(j, xx);
              acc += 0.5 * (f1 * f2 + g1 * g2);
            }
            if (!fr.in_block(a, nu) && fr.in_block(j, nu)) {
              // chi_tilde: <X, I_{E_j} E_a> <Y, T#_{E_a} E_j>
              Nd op = ex.tsharp_op(nu, a);
              double f1 = L.at(j, a, xx);
              double f2 = fr.eps[static_cast<std::size_t>(yy)] * op.at(j, yy);
              double g1 = L.at(j, a, yy);
              double g2 = fr.eps[static_cast<std::size_t>(xx)] * op.at(j, xx);
              acc_t += 0.5 * (f1 * f2 + g1 * g2);
            }
          }
        }
        out.chi[static_cast<std::size_t>(nu)].at(xx, yy) = acc;
        out.chi_tilde[static_cast<std::size_t>(nu)].at(xx, yy) = acc_t;
      }
  }
  (void)chart;
  return out;
}

CheckReport sasaki_identities_check(const Chart& chart, const AdaptedFrameField& frame,
                                    const SasakiStructure& s,
                                    const std::vector<std::vector<double>>& sample_points,
                                    double tol) {
  CheckReport rep;
  const int n = chart.n;
  double t4 = 0.0, ta_perp = 0.0, ups_ta = 0.0, ups_t4t = 0.0;
  double t4_perp_diag = 0.0, ta_diag = 0.0, ups_t4_diag = 0.0, ups_tat_diag = 0.0;
  int n4 = s.n4;

  for (const auto& p : sample_points) {
    ExtrinsicData ex = distributions::extrinsic_at(chart, frame, p.data());
    const FramePoint& fr = ex.fr;
    Signature sig{std::vector<double>(fr.eps)};

    // casorati of the big block: T^flat_4 = -3 g_4
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        if (!fr.in_block(a, 3) || !fr.in_block(b, 3)) continue;
        double v = fr.eps[static_cast<std::size_t>(b)] * ex.casorati_t[3].at(a, b);
        double want = (a == b) ? -3.0 * fr.eps[static_cast<std::size_t>(a)] : 0.0;
        t4 = std::max(t4, std::fabs(v - want));
      }
    for (int blk = 0; blk < 3; ++blk) {
      // Ttilde^flat_a = -g on the complement
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          if (fr.in_block(a, blk) || fr.in_block(b, blk)) continue;
          double v = fr.eps[static_cast<std::size_t>(b)] * ex.casorati_t_perp[static_cast<std::size_t>(blk)].at(a, b);
          double want = (a == b) ? -fr.eps[static_cast<std::size_t>(a)] : 0.0;
          ta_perp = std::max(ta_perp, std::fabs(v - want));
        }
    }

    auto upsilon_of = [&](const Nd& t) {
      TensorValue tv(2, 1, n, "f");
      for (std::size_t q = 0; q < t.size(); ++q) tv.comps[q] = t[q];
      return core_tensor::upsilon(tv, tv, sig);
    };
    // Upsilon_{T_a, T_a} = 0 and Upsilon_{Ttilde_4, Ttilde_4} = 0
    for (int blk = 0; blk < 3; ++blk) {
      TensorValue u = upsilon_of(ex.T[static_cast<std::size_t>(blk)]);
      ups_ta = std::max(ups_ta, core_tensor::max_abs(u));
    }
    {
      TensorValue u = upsilon_of(ex.T_tilde[3]);
      ups_t4t = std::max(ups_t4t, core_tensor::max_abs(u));
    }

    for (int a = 0; a < 3; ++a) {
      int ga = fr.offset[static_cast<std::size_t>(a)];
      // Ttilde^flat_4 (xi_a, xi_a) = 0
      double v4 = fr.eps[static_cast<std::size_t>(ga)] * ex.casorati_t_perp[3].at(ga, ga);
      t4_perp_diag = std::max(t4_perp_diag, std::fabs(v4));
      // sum over the other blocks of their complement Casorati at (xi_a, xi_a) = -2
      double vsum = 0.0;
      for (int nu = 0; nu < 4; ++nu) {
        if (nu == a) continue;
        vsum += fr.eps[static_cast<std::size_t>(ga)] * ex.casorati_t_perp[static_cast<std::size_t>(nu)].at(ga, ga);
      }
      ta_diag = std::max(ta_diag, std::fabs(vsum + 2.0));
      // Upsilon_{T_4,T_4}(xi_a,xi_a) = 2 n4
      TensorValue u4 = upsilon_of(ex.T[3]);
      ups_t4_diag = std::max(ups_t4_diag, std::fabs(u4.comps.at(ga, ga) - 2.0 * n4));
      // Upsilon_{Ttilde_a, Ttilde_a}(xi_a, xi_a) = 4 + 2 n4
      TensorValue ut = upsilon_of(ex.T_tilde[static_cast<std::size_t>(a)]);
      ups_tat_diag = std::max(ups_tat_diag, std::fabs(ut.comps.at(ga, ga) - (4.0 + 2.0 * n4)));
    }
  }

  rep.add("casorati_T4_flat_plus_3g", t4, 0.0, tol);
  rep.add("casorati_Ta_perp_flat_plus_g", ta_perp, 0.0, tol);
  rep.add("upsilon_Ta", ups_ta, 0.0, tol);
  rep.add("upsilon_Ttilde4", ups_t4t, 0.0, tol);
  rep.add("casorati_Ttilde4_diag", t4_perp_diag, 0.0, tol);
  rep.add("casorati_Ta_diag_plus_2", ta_diag, 0.0, tol);
  rep.add("upsilon_T4_diag_minus_2n4", ups_t4_diag, 0.0, tol);
  rep.add("upsilon_Ttilde_a_diag", ups_tat_diag, 0.0, tol);
  return rep;
}

SasakiELResult sasaki_el_residual(const Chart& chart, const AdaptedFrameField& frame,
                                  const SasakiStructure& s,
                                  const std::vector<std::vector<double>>& sample_points,
                                  const ContorsionField* I, double tol) {
  CheckReport sc = sasaki_structure_check(chart, frame, s, sample_points, 1e-6);
  if (!sc.pass) throw PreconditionFailed("Reeb structure relations fail");
  const int n = chart.n;
  const int k = frame.split.k();
  const int n4 = s.n4;

  // the contorsion must have no components across three distinct blocks
  if (I) {
    for (const auto& p : sample_points) {
      FramePoint fr = frame.at(p.data());
      Nd L = contorsion::lowered(I->at(p.data(), fr), fr);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          for (int c = 0; c < n; ++c) {
            int ba = fr.block_of(a), bb = fr.block_of(b), bc = fr.block_of(c);
            if (ba == bb || bb == bc || ba == bc) continue;
            if (std::fabs(L.at(a, b, c)) > 1e-9)
              throw PreconditionFailed("contorsion has components across three distinct blocks");
          }
    }
  }

  auto div_scalar_field = [&](const std::function<std::vector<double>(const double*, const FramePoint&)>& vf,
                              const double* x) {
    VectorFieldFn f = [&](const double* p, double* out) {
      FramePoint fr = frame.at(p);
      std::vector<double> v = vf(p, fr);
      fr.to_coord(v.data(), out);
    };
    return geometry::divergence_at(f, chart, x);
  };

  SasakiELResult res;
  res.report.tol = tol;
  res.report.residual_per_block.assign(static_cast<std::size_t>(k), 0.0);

  std::vector<std::vector<double>> lam_d4;   // per point: diagonal lambda estimates
  std::vector<double> lam_abc;

  for (const auto& p : sample_points) {
    const double* x = p.data();
    FramePoint fr = frame.at(x);
    ExtrinsicData ex = distributions::extrinsic_at(chart, frame, x);
    double sbar = functionals::mixed_scalar_at(chart, frame, x, I);
    PhiChiTensors pc = sasaki_tensors_at(chart, frame, s, x, I);
    Nd ic({n, n, n});
    if (I) ic = I->at(x, fr);
    Nd L = contorsion::lowered(ic, fr);

    // shared divergence terms
    double div_traces = 0.0;
    for (int i = 0; i < k; ++i) {
      div_traces += div_scalar_field(
          [&, i](const double* q, const FramePoint& f2) {
            Nd icq({n, n, n});
            if (I) icq = I->at(q, f2);
            auto tb = contorsion::trace_bottom(icq, f2, i);
            auto tt = contorsion::trace_top(icq, f2, i);
            std::vector<double> v(static_cast<std::size_t>(n), 0.0);
            for (int c = 0; c < n; ++c) {
              if (f2.in_block(c, i))
                v[static_cast<std::size_t>(c)] += tb[static_cast<std::size_t>(c)];
              else
                v[static_cast<std::size_t>(c)] += tt[static_cast<std::size_t>(c)];
            }
            return v;
          },
          x);
    }

    double div_pnu_trbot = 0.0;  // sum_{nu != 4}
    for (int nu = 0; nu < 3; ++nu) {
      div_pnu_trbot += div_scalar_field(
          [&, nu](const double* q, const FramePoint& f2) {
            Nd icq({n, n, n});
            if (I) icq = I->at(q, f2);
            auto tb = contorsion::trace_bottom(icq, f2, nu);
            return project_block(f2, tb, nu, false);
          },
          x);
    }
    double div_p4perp_trtop = div_scalar_field(
        [&](const double* q, const FramePoint& f2) {
          Nd icq({n, n, n});
          if (I) icq = I->at(q, f2);
          auto tt = contorsion::trace_top(icq, f2, 3);
          return project_block(f2, tt, 3, true);
        },
        x);

    // D4 tensor equation
    int o4 = fr.offset[3];
    for (int ai = 0; ai < n4; ++ai) {
      for (int bi = 0; bi < n4; ++bi) {
        int ga = o4 + ai, gb = o4 + bi;
        double gab = (ga == gb) ? fr.eps[static_cast<std::size_t>(ga)] : 0.0;
        double v = 0.0;
        for (int nu = 0; nu < 3; ++nu) {
          // <phi_nu(X,Y), 1/2 tr_top_nu I>
          auto tt = contorsion::trace_top(ic, fr, nu);
          double acc = 0.0;
          for (int c = 0; c < n; ++c)
            acc += 0.5 * tt[static_cast<std::size_t>(c)] * fr.eps[static_cast<std::size_t>(c)] *
                   pc.phi[static_cast<std::size_t>(nu)].at(ga, gb, c);
          v += acc;
          // -2 Div phi_top_nu
          TensorFieldFn pf = [&, nu](const double* q, Nd& out) {
            FramePoint f2 = frame.at(q);
            Nd icq({n, n, n});
            if (I) icq = I->at(q, f2);
            Nd phi({n, n, n});
            for (int aa = 0; aa < n; ++aa)
              for (int bb = 0; bb < n; ++bb)
                for (int cc = 0; cc < n; ++cc) {
                  if (!f2.in_block(aa, nu) && !f2.in_block(bb, nu) && f2.in_block(cc, nu))
                    phi.at(aa, bb, cc) = icq.at(aa, bb, cc) + icq.at(bb, aa, cc);
                }
            out = contorsion::coord_components(phi, f2);
          };
          Nd divp = geometry::divergence_tensor_at(pf, 2, chart, x);
          double dv = 0.0;
          for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
              dv += fr.E[static_cast<std::size_t>(ga) * n + i] * fr.E[static_cast<std::size_t>(gb) * n + j] * divp.at(i, j);
          v -= 2.0 * dv;
        }
        // +7 sum_a Sym(<phi_tilde_4(tT_{xi_a} Y, X), xi_a>)
        for (int a = 0; a < 3; ++a) {
          Nd op = ex.tsharp_op_perp(a, fr.offset[static_cast<std::size_t>(a)]);
          double sym = 0.0;
          for (int z = 0; z < n; ++z) {
            // tT xi-op applied to E_gb / E_ga
            double tb = op.at(gb, z), ta = op.at(ga, z);
            if (tb != 0.0) {
              for (int c = 0; c < n; ++c)
                if (fr.in_block(c, a) && c == fr.offset[static_cast<std::size_t>(a)])
                  sym += 0.5 * tb * fr.eps[static_cast<std::size_t>(c)] * pc.phi_tilde[3].at(z, ga, c);
            }
            if (ta != 0.0) {
              for (int c = 0; c < n; ++c)
                if (fr.in_block(c, a) && c == fr.offset[static_cast<std::size_t>(a)])
                  sym += 0.5 * ta * fr.eps[static_cast<std::size_t>(c)] * pc.phi_tilde[3].at(z, gb, c);
            }
          }
          v += 7.0 * sym;
        }
        v += 30.0 * gab;
        v -= div_pnu_trbot * gab;
        // + <phi_tilde_4, 1/2 tr_bot_4 I>
        {
          auto tb = contorsion::trace_bottom(ic, fr, 3);
          double acc = 0.0;
          for (int c = 0; c < n; ++c)
            acc += 0.5 * tb[static_cast<std::size_t>(c)] * fr.eps[static_cast<std::size_t>(c)] * pc.phi_tilde[3].at(ga, gb, c);
          v += acc;
        }
        // -2 Div phi_tilde_perp_4
        {
          TensorFieldFn pf = [&](const double* q, Nd& out) {
            FramePoint f2 = frame.at(q);
            Nd icq({n, n, n});
            if (I) icq = I->at(q, f2);
            Nd phi({n, n, n});
            for (int aa = 0; aa < n; ++aa)
              for (int bb = 0; bb < n; ++bb)
                for (int cc = 0; cc < n; ++cc) {
                  if (f2.in_block(aa, 3) && f2.in_block(bb, 3) && !f2.in_block(cc, 3))
                    phi.at(aa, bb, cc) = icq.at(aa, bb, cc) + icq.at(bb, aa, cc);
                }
            out = contorsion::coord_components(phi, f2);
          };
          Nd divp = geometry::divergence_tensor_at(pf, 2, chart, x);
          double dv = 0.0;
          for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
              dv += fr.E[static_cast<std::size_t>(ga) * n + i] * fr.E[static_cast<std::size_t>(gb) * n + j] * divp.at(i, j);
          v -= 2.0 * dv;
        }
        v -= div_p4perp_trtop * gab;
        v += (2.0 * sbar - div_traces) * gab;
        // residual against lambda * <X,Y>: collect diagonal estimates
        if (ga == gb) {
          lam_d4.push_back({v * fr.eps[static_cast<std::size_t>(ga)]});
        } else {
          res.report.residual_per_block[3] = std::max(res.report.residual_per_block[3], std::fabs(v));
        }
      }
    }

    // one-dimensional equations
    for (int a = 0; a < 3; ++a) {
      double div9 = div_scalar_field(
          [&, a](const double* q, const FramePoint& f2) {
            Nd icq({n, n, n});
            if (I) icq = I->at(q, f2);
            int gxi = f2.offset[static_cast<std::size_t>(a)];
            std::vector<double> v(static_cast<std::size_t>(n), 0.0);
            for (int c = 0; c < n; ++c)
              if (!f2.in_block(c, a)) v[static_cast<std::size_t>(c)] = icq.at(gxi, gxi, c);
            return v;
          },
          x);
      double divsum = 0.0;
      for (int nu = 0; nu < 4; ++nu) {
        if (nu == a) continue;
        divsum += div_scalar_field(
            [&, nu](const double* q, const FramePoint& f2) {
              Nd icq({n, n, n});
              if (I) icq = I->at(q, f2);
              auto tb = contorsion::trace_bottom(icq, f2, nu);
              return project_block(f2, tb, nu, false);
            },
            x);
      }
      double v = -9.0 * div9 - divsum - 10.0 - 2.0 * n4 + 2.0 * sbar - div_traces;
      lam_abc.push_back(v);
    }
  }

  // lambda from the D4 diagonal estimates
  double lam = 0.0;
  std::size_t cnt = 0;
  for (const auto& v : lam_d4)
    for (double w : v) {
      lam += w;
      ++cnt;
    }
  for (double w : lam_abc) {
    lam += w;
    ++cnt;
  }
  if (cnt > 0) lam /= static_cast<double>(cnt);
  res.report.lambda = lam;

  double rmax = res.report.residual_per_block[3];
  for (const auto& v : lam_d4)
    for (double w : v) rmax = std::max(rmax, std::fabs(w - lam));
  for (double w : lam_abc) rmax = std::max(rmax, std::fabs(w - lam));
  res.report.max_residual = rmax;
  res.report.pass = rmax < tol;

  // traced pair: the lambda each family implies, net of the shared curvature
  // and trace-divergence terms (constants 30 and -(10 + 2 n4) for I = 0)
  {
    const double* x = sample_points.front().data();
    double sbar = functionals::mixed_scalar_at(chart, frame, x, I);
    double mean_d4 = 0.0;
    for (const auto& v : lam_d4) mean_d4 += v[0];
    if (!lam_d4.empty()) mean_d4 /= static_cast<double>(lam_d4.size());
    double mean_abc = 0.0;
    for (double w : lam_abc) mean_abc += w;
    if (!lam_abc.empty()) mean_abc /= static_cast<double>(lam_abc.size());
    res.traced_d4_constant = mean_d4 - 2.0 * sbar;
    res.traced_abc_constant = mean_abc - 2.0 * sbar;
    res.mismatch = std::fabs(res.traced_d4_constant - res.traced_abc_constant);
  }
  return res;
}

double weighted_action_c(int n4) {
  if (n4 < 4 || n4 % 4 != 0) throw BadInput("complement dimension must be a positive multiple of four");
  return -static_cast<double>(n4) / (n4 + 6.0);
}

std::pair<double, double> weighted_action_lambdas(const Chart& chart, const AdaptedFrameField& frame,
                                                  const double* x, double c) {
  FramePoint fr = frame.at(x);
  const int k = fr.k;
  if (k != 4) throw BadInput("weighted action verification expects a (1,1,1,n4) split");

  // variation of the weighted pair-sum on the complement block
  Nd d4 = el_metric::delta_q_mu_own_at(chart, frame, x, 3);
  d4 *= c;
  for (int a = 0; a < 3; ++a) d4 += el_metric::delta_q_mu_dual_at(chart, frame, x, 3, a);
  int o4 = fr.offset[3];
  double lam_d4 = 0.0;
  for (int i = 0; i < fr.dims[3]; ++i)
    lam_d4 += fr.eps[static_cast<std::size_t>(o4 + i)] * d4.at(o4 + i, o4 + i) / fr.dims[3];

  // variation on a one-dimensional block (a = 0)
  Nd da = el_metric::delta_q_mu_own_at(chart, frame, x, 0);
  for (int b = 1; b < 3; ++b) da += el_metric::delta_q_mu_dual_at(chart, frame, x, 0, b);
  Nd d4dual = el_metric::delta_q_mu_dual_at(chart, frame, x, 0, 3);
  d4dual *= c;
  da += d4dual;
  int o0 = fr.offset[0];
  double lam_abc = fr.eps[static_cast<std::size_t>(o0)] * da.at(o0, o0);
  return {lam_d4, lam_abc};
}

}  // namespace mixedcurv::special_geometries
