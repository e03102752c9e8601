#include "mixedcurv/contorsion.hpp"

#include <cmath>

#include "mixedcurv/errors.hpp"

namespace mixedcurv::contorsion {

Nd lowered(const Nd& icomps, const FramePoint& fr) {
  const int n = fr.n;
  Nd L({n, n, n});
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        L.at(a, b, c) = fr.eps[static_cast<std::size_t>(c)] * icomps.at(a, b, c);
  return L;
}

Nd raise_last(const Nd& lcomps, const FramePoint& fr) {
  const int n = fr.n;
  Nd I({n, n, n});
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        I.at(a, b, c) = fr.eps[static_cast<std::size_t>(c)] * lcomps.at(a, b, c);
  return I;
}

ContorsionConjugates conjugates_at(const ContorsionField& I, const Chart& chart,
                                   const AdaptedFrameField& frame, const double* x) {
  (void)chart;
  FramePoint fr = frame.at(x);
  const int n = fr.n;
  Nd ic = I.at(x, fr);
  Nd L = lowered(ic, fr);
  Nd Ls({n, n, n}), Lw({n, n, n}), Lsw({n, n, n});
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        Ls.at(a, b, c) = L.at(a, c, b);
        Lw.at(a, b, c) = L.at(b, a, c);
        Lsw.at(a, b, c) = L.at(b, c, a);
      }
  ContorsionConjugates out;
  out.star = raise_last(Ls, fr);
  out.wedge = raise_last(Lw, fr);
  out.star_wedge = raise_last(Lsw, fr);
  out.theta = out.star;  // reshape only
  for (std::size_t q = 0; q < out.theta.size(); ++q)
    out.theta[q] = ic[q] - out.star[q] + out.wedge[q] - out.star_wedge[q];
  return out;
}

std::vector<double> trace_top(const Nd& icomps, const FramePoint& fr, int mu) {
  std::vector<double> v(static_cast<std::size_t>(fr.n), 0.0);
  for (int a = 0; a < fr.n; ++a) {
    if (!fr.in_block(a, mu)) continue;
    for (int c = 0; c < fr.n; ++c)
      v[static_cast<std::size_t>(c)] += fr.eps[static_cast<std::size_t>(a)] * icomps.at(a, a, c);
  }
  return v;
}

std::vector<double> trace_bottom(const Nd& icomps, const FramePoint& fr, int mu) {
  std::vector<double> v(static_cast<std::size_t>(fr.n), 0.0);
  for (int i = 0; i < fr.n; ++i) {
    if (fr.in_block(i, mu)) continue;
    for (int c = 0; c < fr.n; ++c)
      v[static_cast<std::size_t>(c)] += fr.eps[static_cast<std::size_t>(i)] * icomps.at(i, i, c);
  }
  return v;
}

std::pair<std::vector<double>, std::vector<double>> partial_traces_at(const ContorsionField& I,
                                                                      const Chart& chart,
                                                                      const AdaptedFrameField& frame,
                                                                      const double* x, int mu) {
  (void)chart;
  FramePoint fr = frame.at(x);
  if (mu < 0 || mu >= fr.k) throw BadInput("block index out of range");
  Nd ic = I.at(x, fr);
  return {trace_top(ic, fr, mu), trace_bottom(ic, fr, mu)};
}

ContorsionField make_semi_symmetric(VectorFieldFn u_field) {
  ContorsionField f;
  f.flavor = ContorsionFlavor::SemiSymmetric;
  f.u = u_field;
  f.value_fn = [u_field](const double* x, const FramePoint& fr, Nd& out) {
    const int n = fr.n;
    std::vector<double> uc(static_cast<std::size_t>(n));
    u_field(x, uc.data());
    std::vector<double> uf(static_cast<std::size_t>(n));
    for (int a = 0; a < n; ++a) uf[static_cast<std::size_t>(a)] = fr.frame_comp(uc.data(), a);
    // I_X Y = <U,Y> X - <X,Y> U
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        double uyb = fr.eps[static_cast<std::size_t>(b)] * uf[static_cast<std::size_t>(b)];
        double gab = (a == b) ? fr.eps[static_cast<std::size_t>(a)] : 0.0;
        for (int c = 0; c < n; ++c)
          out.at(a, b, c) = uyb * ((a == c) ? 1.0 : 0.0) - gab * uf[static_cast<std::size_t>(c)];
      }
  };
  return f;
}

ContorsionField make_statistical(std::function<void(const double*, const FramePoint&, Nd&)> c_fn) {
  ContorsionField f;
  f.flavor = ContorsionFlavor::Statistical;
  f.value_fn = [c_fn](const double* x, const FramePoint& fr, Nd& out) {
    Nd L({fr.n, fr.n, fr.n});
    c_fn(x, fr, L);
    out = raise_last(L, fr);
  };
  return f;
}

ContorsionField make_skew(std::function<void(const double*, const FramePoint&, Nd&)> t3_fn) {
  ContorsionField f;
  f.flavor = ContorsionFlavor::SkewTorsion;
  f.value_fn = [t3_fn](const double* x, const FramePoint& fr, Nd& out) {
    Nd L({fr.n, fr.n, fr.n});
    t3_fn(x, fr, L);
    for (std::size_t q = 0; q < L.size(); ++q) L[q] *= 0.5;
    out = raise_last(L, fr);
  };
  return f;
}

ContorsionField make_zero() {
  ContorsionField f;
  f.flavor = ContorsionFlavor::Statistical;  // zero satisfies every flavor
  f.value_fn = [](const double*, const FramePoint& fr, Nd& out) { out.reshape({fr.n, fr.n, fr.n}); };
  return f;
}

ContorsionField make_generic(std::function<void(const double*, const FramePoint&, Nd&)> fn) {
  ContorsionField f;
  f.flavor = ContorsionFlavor::Generic;
  f.value_fn = std::move(fn);
  return f;
}

void validate_flavor(const ContorsionField& I, const Chart& chart, const AdaptedFrameField& frame,
                     const std::vector<std::vector<double>>& sample_points, double tol) {
  for (const auto& p : sample_points) {
    FramePoint fr = frame.at(p.data());
    const int n = fr.n;
    Nd ic = I.at(p.data(), fr);
    Nd L = lowered(ic, fr);
    double worst = 0.0;
    switch (I.flavor) {
      case ContorsionFlavor::Generic:
        break;
      case ContorsionFlavor::Statistical:
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c) {
              worst = std::max(worst, std::fabs(L.at(a, b, c) - L.at(b, a, c)));
              worst = std::max(worst, std::fabs(L.at(a, b, c) - L.at(a, c, b)));
            }
        break;
      case ContorsionFlavor::MetricCompatible:
      case ContorsionFlavor::SkewTorsion:
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c) {
              worst = std::max(worst, std::fabs(L.at(a, b, c) + L.at(a, c, b)));
              if (I.flavor == ContorsionFlavor::SkewTorsion)
                worst = std::max(worst, std::fabs(L.at(a, b, c) + L.at(b, a, c)));
            }
        break;
      case ContorsionFlavor::SemiSymmetric: {
        ContorsionField ref = make_semi_symmetric(I.u);
        Nd rc = ref.at(p.data(), fr);
        for (std::size_t q = 0; q < rc.size(); ++q) worst = std::max(worst, std::fabs(rc[q] - ic[q]));
        break;
      }
    }
    if (worst > tol) {
      throw FlavorViolation("contorsion flavor invariant violated by " + std::to_string(worst));
    }
    (void)chart;
  }
}

Nd coord_components(const Nd& icomps, const FramePoint& fr) {
  const int n = fr.n;
  // W[a][i] = eps_a <d_i, E_a> = eps_a (g E_a)_i
  std::vector<double> W(static_cast<std::size_t>(n) * n, 0.0);
  for (int a = 0; a < n; ++a)
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int m = 0; m < n; ++m) acc += fr.g[static_cast<std::size_t>(i) * n + m] * fr.E[static_cast<std::size_t>(a) * n + m];
      W[static_cast<std::size_t>(a) * n + i] = fr.eps[static_cast<std::size_t>(a)] * acc;
    }
  Nd out({n, n, n});  // at(i,j,l) = I^l_ij
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) {
        double acc = 0.0;
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) {
            double wab = W[static_cast<std::size_t>(a) * n + i] * W[static_cast<std::size_t>(b) * n + j];
            if (wab == 0.0) continue;
            for (int c = 0; c < n; ++c)
              acc += icomps.at(a, b, c) * wab * fr.E[static_cast<std::size_t>(c) * n + l];
          }
        out.at(i, j, l) = acc;
      }
  return out;
}

}  // namespace mixedcurv::contorsion
