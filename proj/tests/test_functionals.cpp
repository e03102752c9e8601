#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mixedcurv/functionals.hpp"
#include "mixedcurv/model_zoo.hpp"

using namespace mixedcurv;

namespace {

ContorsionField random_statistical_field(int n, unsigned seed, double amp = 0.2) {
  auto coeffs = std::make_shared<std::vector<double>>();
  std::mt19937_64 rng(seed);
  for (int i = 0; i < n * n * n; ++i)
    coeffs->push_back(amp * (static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0));
  return contorsion::make_statistical([coeffs, n](const double* x, const FramePoint& fr, Nd& out) {
    out.reshape({fr.n, fr.n, fr.n});
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c) {
          double v = 0.0;
          int tri[6][3] = {{a, b, c}, {a, c, b}, {b, a, c}, {b, c, a}, {c, a, b}, {c, b, a}};
          for (auto& t : tri) v += (*coeffs)[static_cast<std::size_t>((t[0] * n + t[1]) * n + t[2])];
          out.at(a, b, c) = v / 6.0 * (1.0 + 0.4 * std::sin(x[0]) * std::cos(x[n - 1]));
        }
  });
}

VectorFieldFn random_u_field(int n, unsigned seed, double amp = 0.25) {
  auto coeffs = std::make_shared<std::vector<double>>();
  std::mt19937_64 rng(seed);
  for (int i = 0; i < 2 * n * n; ++i)
    coeffs->push_back(amp * (static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0));
  return [coeffs, n](const double* x, double* v) {
    for (int c = 0; c < n; ++c) {
      v[c] = 0.0;
      for (int a = 0; a < n; ++a)
        v[c] += (*coeffs)[static_cast<std::size_t>(2 * (c * n + a))] * std::sin(x[a]) +
                (*coeffs)[static_cast<std::size_t>(2 * (c * n + a) + 1)] * std::cos(x[a]);
    }
  };
}

}  // namespace

TEST_CASE("mixed scalar curvature vanishes on flat tori and matches constant-curvature values") {
  ModelParams mp;
  mp.num["n"] = 3;
  ModelInstance t3 = model_zoo::instantiate("flat_torus", mp);
  double x[3] = {1.0, 2.0, 3.0};
  CHECK(functionals::mixed_scalar_at(t3.chart, t3.frame, x, nullptr) == doctest::Approx(0.0).epsilon(1e-10));

  ModelParams pk;
  pk.num["K"] = 1.0;
  ModelInstance sc = model_zoo::instantiate("surface_circle", pk);
  double y[3] = {1.2, 1.0, 2.0};
  CHECK(functionals::mixed_scalar_at(sc.chart, sc.frame, y, nullptr) == doctest::Approx(1.0).epsilon(1e-7));

  ModelInstance s3 = model_zoo::instantiate("sphere3_lie", {});
  double z[3] = {0.12, 0.07, -0.2};
  CHECK(functionals::mixed_scalar_at(s3.chart, s3.frame, z, nullptr) == doctest::Approx(3.0).epsilon(1e-7));
}

TEST_CASE("one-dimensional pair reduces to the Ricci curvature of the unit direction") {
  ModelParams pk;
  pk.num["K"] = 1.0;
  ModelInstance sc = model_zoo::instantiate("surface_circle", pk);
  double x[3] = {1.3, 0.4, 1.1};
  // block 2 is the circle direction: Ric_tt = 0
  CHECK(functionals::pair_mixed_scalar_at(sc.chart, sc.frame, x, 2, nullptr) == doctest::Approx(0.0).epsilon(1e-7));
  // block 0 is a surface direction: Ric = K
  CHECK(functionals::pair_mixed_scalar_at(sc.chart, sc.frame, x, 0, nullptr) == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("pair decomposition identity holds with and without contorsion") {
  for (const char* name : {"twisted_3d", "sphere3_lie"}) {
    ModelInstance m = model_zoo::instantiate(name, {});
    auto pts = m.sample_points(4, 17);
    ContorsionField stat = random_statistical_field(3, 31);
    VectorFieldFn u = random_u_field(3, 41);
    ContorsionField semi = contorsion::make_semi_symmetric(u);
    std::vector<const ContorsionField*> conns{nullptr, &stat, &semi};
    for (const auto& p : pts) {
      for (const ContorsionField* I : conns) {
        double two_s = 2.0 * functionals::mixed_scalar_at(m.chart, m.frame, p.data(), I);
        double sum = 0.0;
        for (int mu = 0; mu < m.split.k(); ++mu)
          sum += functionals::pair_mixed_scalar_at(m.chart, m.frame, p.data(), mu, I);
        CHECK(two_s == doctest::Approx(sum).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("q and qbar terms vanish on products with zero contorsion") {
  ModelParams mp;
  mp.num["n"] = 3;
  ModelInstance m = model_zoo::instantiate("flat_torus", mp);
  double x[3] = {0.7, 1.9, 4.1};
  ContorsionField z = contorsion::make_zero();
  for (int mu = 0; mu < 3; ++mu) {
    CHECK(functionals::q_term_at(m.chart, m.frame, x, mu) == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(functionals::qbar_term_at(m.chart, m.frame, x, mu, z) == doctest::Approx(0.0).epsilon(1e-10));
  }
  auto y = functionals::y_field_at(m.chart, m.frame, x, nullptr);
  for (double v : y) CHECK(v == doctest::Approx(0.0));
}

TEST_CASE("generic qbar matches the closed form for semi-symmetric contorsions") {
  for (const char* name : {"twisted_3d", "sphere3_lie", "surface_circle"}) {
    ModelParams mp;
    if (std::string(name) == "surface_circle") mp.num["K"] = 1.0;
    ModelInstance m = model_zoo::instantiate(name, mp);
    const int n = m.chart.n;
    VectorFieldFn u = random_u_field(n, 53);
    ContorsionField I = contorsion::make_semi_symmetric(u);
    auto pts = m.sample_points(4, 61);
    for (const auto& p : pts) {
      ExtrinsicData ex = distributions::extrinsic_at(m.chart, m.frame, p.data());
      const FramePoint& fr = ex.fr;
      std::vector<double> uc(static_cast<std::size_t>(n));
      u(p.data(), uc.data());
      std::vector<double> uf(static_cast<std::size_t>(n));
      for (int c = 0; c < n; ++c) uf[static_cast<std::size_t>(c)] = fr.frame_comp(uc.data(), c);
      for (int mu = 0; mu < m.split.k(); ++mu) {
        double qbar = functionals::qbar_term_at(m.chart, m.frame, p.data(), mu, I);
        double nmu = fr.dims[static_cast<std::size_t>(mu)];
        double nperp = n - nmu;
        double uhm = 0.0, uu = 0.0, pu2 = 0.0, ppu2 = 0.0;
        for (int c = 0; c < n; ++c) {
          double e = fr.eps[static_cast<std::size_t>(c)];
          double hmht = ex.H[static_cast<std::size_t>(mu)][static_cast<std::size_t>(c)] -
                        ex.H_tilde[static_cast<std::size_t>(mu)][static_cast<std::size_t>(c)];
          uhm += e * uf[static_cast<std::size_t>(c)] * hmht;
          uu += e * uf[static_cast<std::size_t>(c)] * uf[static_cast<std::size_t>(c)];
          if (fr.in_block(c, mu))
            pu2 += e * uf[static_cast<std::size_t>(c)] * uf[static_cast<std::size_t>(c)];
          else
            ppu2 += e * uf[static_cast<std::size_t>(c)] * uf[static_cast<std::size_t>(c)];
        }
        // the closed form, normalized against the divergence identity:
        // -Qbar = (n - n_perp) <U, H - Ht> + n n_perp |U|^2 - n |P_perp U|^2 - n_perp |P U|^2
        double closed = -((nmu - nperp) * uhm + nperp * nmu * uu - nmu * ppu2 - nperp * pu2);
        CHECK(qbar == doctest::Approx(closed).epsilon(1e-8));
      }
    }
  }
}

TEST_CASE("statistical qbar takes the short two-term form") {
  ModelInstance m = model_zoo::instantiate("twisted_3d", {});
  const int n = 3;
  ContorsionField I = random_statistical_field(n, 71);
  auto pts = m.sample_points(3, 73);
  for (const auto& p : pts) {
    ExtrinsicData ex = distributions::extrinsic_at(m.chart, m.frame, p.data());
    const FramePoint& fr = ex.fr;
    Nd ic = I.at(p.data(), fr);
    Nd L = contorsion::lowered(ic, fr);
    for (int mu = 0; mu < 3; ++mu) {
      double qbar = functionals::qbar_term(ex, ic, mu);
      auto tt = contorsion::trace_top(ic, fr, mu);
      auto tb = contorsion::trace_bottom(ic, fr, mu);
      double dot = 0.0;
      for (int c = 0; c < n; ++c)
        dot += fr.eps[static_cast<std::size_t>(c)] * tt[static_cast<std::size_t>(c)] * tb[static_cast<std::size_t>(c)];
      double ii = 0.0;
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          bool ain = fr.in_block(a, mu), bin = fr.in_block(b, mu);
          if (ain == bin) continue;
          double w = fr.eps[static_cast<std::size_t>(a)] * fr.eps[static_cast<std::size_t>(b)];
          for (int c = 0; c < n; ++c)
            ii += w * fr.eps[static_cast<std::size_t>(c)] * L.at(a, b, c) * L.at(a, b, c);
        }
      CHECK(qbar == doctest::Approx(dot - 0.5 * ii).epsilon(1e-9));
    }
  }
}

TEST_CASE("statistical mixed scalar identity relates both connections pointwise") {
  ModelInstance m = model_zoo::instantiate("twisted_3d", {});
  ContorsionField I = random_statistical_field(3, 81);
  auto pts = m.sample_points(4, 83);
  for (const auto& p : pts) {
    double sbar = functionals::mixed_scalar_at(m.chart, m.frame, p.data(), &I);
    double s = functionals::mixed_scalar_at(m.chart, m.frame, p.data(), nullptr);
    ExtrinsicData ex = distributions::extrinsic_at(m.chart, m.frame, p.data());
    Nd ic = I.at(p.data(), ex.fr);
    double corr = 0.0;
    for (int mu = 0; mu < 3; ++mu) corr += functionals::qbar_term(ex, ic, mu);
    CHECK(2.0 * sbar == doctest::Approx(2.0 * s + corr).epsilon(1e-7));
  }
}

TEST_CASE("divergence identity residual is small on several models and connections") {
  ModelParams pk;
  pk.num["K"] = 1.0;
  std::vector<ModelInstance> models;
  ModelParams mp;
  mp.num["n"] = 3;
  models.push_back(model_zoo::instantiate("flat_torus", mp));
  models.push_back(model_zoo::instantiate("surface_circle", pk));
  models.push_back(model_zoo::instantiate("twisted_3d", {}));
  for (auto& m : models) {
    auto pts = m.sample_points(3, 91);
    ContorsionField stat = random_statistical_field(m.chart.n, 93);
    VectorFieldFn u = random_u_field(m.chart.n, 95);
    ContorsionField semi = contorsion::make_semi_symmetric(u);
    for (const auto& p : pts) {
      CHECK(functionals::divergence_identity_residual(m.chart, m.frame, p.data(), nullptr) < 1e-6);
      CHECK(functionals::divergence_identity_residual(m.chart, m.frame, p.data(), &stat) < 1e-5);
      CHECK(functionals::divergence_identity_residual(m.chart, m.frame, p.data(), &semi) < 1e-5);
    }
  }
}

TEST_CASE("action integral: flat torus vanishes; wavy torus is grid-converged") {
  ModelParams mp;
  mp.num["n"] = 2;
  ModelInstance t2 = model_zoo::instantiate("flat_torus", mp);
  QuadratureGrid g = QuadratureGrid::standard(t2.chart, 8, 9);
  CHECK(functionals::action_integral(t2.chart, t2.frame, g, nullptr) == doctest::Approx(0.0).epsilon(1e-9));

  Chart c;
  c.n = 2;
  c.lo = {0.0, 0.0};
  c.hi = {2.0 * M_PI, 2.0 * M_PI};
  c.periodic = {1, 1};
  c.metric_fn = [](const double* x, double* gm) {
    gm[0] = 1.0;
    gm[1] = gm[2] = 0.0;
    gm[3] = 1.0 + 0.1 * std::sin(x[0]);
  };
  SplitSpec split;
  split.dims = {1, 1};
  split.raw_spans.push_back([](const double*, double* v) {
    v[0] = 1;
    v[1] = 0;
  });
  split.raw_spans.push_back([](const double*, double* v) {
    v[0] = 0;
    v[1] = 1;
  });
  AdaptedFrameField f = distributions::build_adapted_frame(c, split);
  QuadratureGrid g1, g2;
  g1.nodes_per_axis = {16, 16};
  g2.nodes_per_axis = {32, 32};
  double a1 = functionals::action_integral(c, f, g1, nullptr);
  double a2 = functionals::action_integral(c, f, g2, nullptr);
  CHECK(std::fabs(a1 - a2) < 1e-8);  // periodic trapezoid converges fast
}

TEST_CASE("chart volume of the round 3-sphere approaches 2 pi^2 from below") {
  // stereographic coordinates cover the sphere minus a point; a large box
  // captures all but an O(R^-3) tail
  Chart c;
  c.n = 3;
  double R = 6.0;
  c.lo.assign(3, -R);
  c.hi.assign(3, R);
  c.periodic.assign(3, 0);
  c.metric_fn = [](const double* x, double* g) {
    double r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
    double f = 2.0 / (1.0 + r2);
    for (int i = 0; i < 9; ++i) g[i] = 0.0;
    g[0] = g[4] = g[8] = f * f;
  };
  QuadratureGrid g;
  g.nodes_per_axis = {81, 81, 81};
  double vol = functionals::integrate(c, g, [&](const double* x) {
    return std::sqrt(std::fabs(geometry::metric_det_at(c, x)));
  });
  double exact = 2.0 * M_PI * M_PI;
  CHECK(vol < exact);
  CHECK(std::fabs(vol - exact) < 0.25);  // missing tail + corner effects
}

TEST_CASE("non-finite integrands are rejected") {
  Chart c;
  c.n = 1;
  c.lo = {0.0};
  c.hi = {1.0};
  c.periodic = {0};
  c.metric_fn = [](const double*, double* g) { g[0] = 1.0; };
  QuadratureGrid g;
  g.nodes_per_axis = {5};
  CHECK_THROWS_AS(functionals::integrate(c, g, [](const double*) { return std::nan(""); }),
                  NumericalInstability);
}
