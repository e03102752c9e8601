#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mixedcurv/el_metric.hpp"
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
          out.at(a, b, c) = v / 6.0 * (1.0 + 0.4 * std::sin(x[0]));
        }
  });
}

VariationField make_bump_variation(const ModelInstance& m, int mu, int a_local, int b_local) {
  VariationField B;
  B.mu = mu;
  const int n = m.chart.n;
  B.center.resize(static_cast<std::size_t>(n));
  B.halfwidth.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double lo = m.chart.lo[static_cast<std::size_t>(i)], hi = m.chart.hi[static_cast<std::size_t>(i)];
    B.center[static_cast<std::size_t>(i)] = 0.5 * (lo + hi);
    B.halfwidth[static_cast<std::size_t>(i)] = 0.35 * (hi - lo);
  }
  B.seed.reshape({n, n});
  int off = 0;
  for (int q = 0; q < mu; ++q) off += m.split.dims[static_cast<std::size_t>(q)];
  int ga = off + a_local, gb = off + b_local;
  B.seed.at(ga, gb) += 0.5;
  B.seed.at(gb, ga) += 0.5;
  return B;
}

}  // namespace

TEST_CASE("variation fields vanish on the support boundary and keep their block") {
  ModelInstance m = model_zoo::instantiate("twisted_3d", {});
  VariationField B = make_bump_variation(m, 1, 0, 0);
  double edge[3] = {B.center[0] + B.halfwidth[0], B.center[1], B.center[2]};
  CHECK(B.bump(edge, 3) == doctest::Approx(0.0));
  double near_edge[3] = {B.center[0] + 0.999 * B.halfwidth[0], B.center[1], B.center[2]};
  CHECK(B.bump(near_edge, 3) < 1e-15);  // high-order contact at the support edge
  double mid[3] = {B.center[0], B.center[1], B.center[2]};
  CHECK(B.bump(mid, 3) == doctest::Approx(1.0));
  Nd bf = el_metric::variation_frame_components(m.chart, m.frame, B, mid);
  FramePoint fr = m.frame.at(mid);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      if (!fr.in_block(a, 1) || !fr.in_block(b, 1)) CHECK(std::fabs(bf.at(a, b)) < 1e-12);
}

TEST_CASE("volume selector matches the closed-form variation of the volume element") {
  ModelInstance m = model_zoo::instantiate("twisted_3d", {});
  QuadratureGrid grid = QuadratureGrid::standard(m.chart, 24, 25);
  VariationField B = make_bump_variation(m, 0, 0, 0);
  double fd = el_metric::fd_metric_gradient(m.chart, m.frame, grid, nullptr, B, ActionSelector::Volume);
  // d vol / dt = 1/2 <g, B> dvol
  double direct = functionals::integrate(m.chart, grid, [&](const double* x) {
    Nd bf = el_metric::variation_frame_components(m.chart, m.frame, B, x);
    FramePoint fr = m.frame.at(x);
    double tr = 0.0;
    for (int a = 0; a < 3; ++a) tr += fr.eps[static_cast<std::size_t>(a)] * bf.at(a, a);
    return 0.5 * tr * std::sqrt(std::fabs(geometry::metric_det_at(m.chart, x)));
  });
  CHECK(fd == doctest::Approx(direct).epsilon(1e-6));
  VariationField Z = B;
  Z.seed.fill(0.0);
  CHECK(el_metric::fd_metric_gradient(m.chart, m.frame, grid, nullptr, Z, ActionSelector::Volume) ==
        doctest::Approx(0.0));
}

TEST_CASE("delta q vanishes identically on metric products") {
  ModelParams mp;
  mp.num["n"] = 3;
  ModelInstance m = model_zoo::instantiate("flat_torus", mp);
  double x[3] = {1.0, 2.2, 3.4};
  for (int mu = 0; mu < 3; ++mu) {
    Nd dq = el_metric::delta_q_mu_at(m.chart, m.frame, x, mu);
    for (std::size_t q = 0; q < dq.size(); ++q) CHECK(std::fabs(dq[q]) < 1e-9);
  }
}

// The pointwise variation tensor of the Q-sum must match the finite-difference
// derivative of its integral against localized variations: this pins every
// term of the assembled expression, including the Casorati convention on
// blocks of dimension one.
TEST_CASE("delta q matches the finite-difference gradient of the q-sum on a lie-frame sphere") {
  ModelInstance m = model_zoo::instantiate("sphere3_lie", {});
  QuadratureGrid grid;
  grid.nodes_per_axis = {15, 15, 15};
  for (int mu = 0; mu < 3; ++mu) {
    VariationField B = make_bump_variation(m, mu, 0, 0);
    // shrink the support so boundary margins are respected
    for (int i = 0; i < 3; ++i) B.halfwidth[static_cast<std::size_t>(i)] *= 0.8;
    double fd = el_metric::fd_metric_gradient(m.chart, m.frame, grid, nullptr, B, ActionSelector::QSum);
    double analytic = functionals::integrate(m.chart, grid, [&](const double* x) {
      Nd bf = el_metric::variation_frame_components(m.chart, m.frame, B, x);
      double bmax = 0.0;
      for (std::size_t q = 0; q < bf.size(); ++q) bmax = std::max(bmax, std::fabs(bf[q]));
      double root = std::sqrt(std::fabs(geometry::metric_det_at(m.chart, x)));
      if (bmax < 1e-14) return 0.0;
      FramePoint fr = m.frame.at(x);
      Nd dq = el_metric::delta_q_mu_at(m.chart, m.frame, x, mu);
      double pair = 0.0;
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
          pair += fr.eps[static_cast<std::size_t>(a)] * fr.eps[static_cast<std::size_t>(b)] * dq.at(a, b) * bf.at(a, b);
      // the q-sum integrand also varies through the volume element
      ExtrinsicData ex = distributions::extrinsic_at(m.chart, m.frame, x);
      double qsum = 0.0;
      for (int nu = 0; nu < 3; ++nu) qsum += functionals::q_term(ex, nu);
      double tr = 0.0;
      for (int a = 0; a < 3; ++a) tr += fr.eps[static_cast<std::size_t>(a)] * bf.at(a, a);
      return (pair + 0.5 * qsum * tr) * root;
    });
    CHECK(fd == doctest::Approx(analytic).epsilon(2e-4));
  }
}

TEST_CASE("statistical delta qbar matches the finite-difference gradient of the qbar-sum") {
  ModelParams mp;
  mp.num["n"] = 3;
  ModelInstance m = model_zoo::instantiate("flat_torus", mp);
  ContorsionField I = random_statistical_field(3, 7);
  QuadratureGrid grid;
  grid.nodes_per_axis = {16, 16, 16};
  for (int mu = 0; mu < 2; ++mu) {
    VariationField B = make_bump_variation(m, mu, 0, 0);
    double fd = el_metric::fd_metric_gradient(m.chart, m.frame, grid, &I, B, ActionSelector::QBarSum);
    double analytic = functionals::integrate(m.chart, grid, [&](const double* x) {
      Nd bf = el_metric::variation_frame_components(m.chart, m.frame, B, x);
      double bmax = 0.0;
      for (std::size_t q = 0; q < bf.size(); ++q) bmax = std::max(bmax, std::fabs(bf[q]));
      double root = std::sqrt(std::fabs(geometry::metric_det_at(m.chart, x)));
      if (bmax < 1e-14) return 0.0;
      FramePoint fr = m.frame.at(x);
      Nd dqb = el_metric::delta_qbar_mu_statistical_at(m.chart, m.frame, x, mu, I);
      double pair = 0.0;
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
          pair += fr.eps[static_cast<std::size_t>(a)] * fr.eps[static_cast<std::size_t>(b)] * dqb.at(a, b) * bf.at(a, b);
      ExtrinsicData ex = distributions::extrinsic_at(m.chart, m.frame, x);
      Nd ic = I.at(x, fr);
      double qsum = 0.0;
      for (int nu = 0; nu < 3; ++nu) qsum += functionals::qbar_term(ex, ic, nu);
      double tr = 0.0;
      for (int a = 0; a < 3; ++a) tr += fr.eps[static_cast<std::size_t>(a)] * bf.at(a, a);
      return (pair + 0.5 * qsum * tr) * root;
    });
    CHECK(fd == doctest::Approx(analytic).epsilon(2e-4));
  }
}

TEST_CASE("action gradient equals the analytic euler-lagrange pairing") {
  // two routes to d/dt of the action: this validates the complete assembly
  ModelInstance m = model_zoo::instantiate("twisted_3d", {});
  QuadratureGrid grid;
  grid.nodes_per_axis = {24, 24, 24};
  ContorsionField I = random_statistical_field(3, 19, 0.15);
  VariationField B = make_bump_variation(m, 0, 0, 0);
  for (int i = 0; i < 3; ++i) B.halfwidth[static_cast<std::size_t>(i)] = 0.45 * 2.0 * M_PI;
  double fd0 = el_metric::fd_metric_gradient(m.chart, m.frame, grid, nullptr, B, ActionSelector::Action);
  double an0 = el_metric::analytic_el_pairing(m.chart, m.frame, grid, nullptr, B);
  CHECK(fd0 == doctest::Approx(an0).epsilon(3e-4));
  double fd1 = el_metric::fd_metric_gradient(m.chart, m.frame, grid, &I, B, ActionSelector::Action);
  double an1 = el_metric::analytic_el_pairing(m.chart, m.frame, grid, &I, B);
  CHECK(fd1 == doctest::Approx(an1).epsilon(3e-4));
}

TEST_CASE("metric product is critical with lambda zero; perturbed metrics are not") {
  ModelParams mp;
  mp.num["n"] = 3;
  ModelInstance m = model_zoo::instantiate("flat_torus", mp);
  auto pts = m.sample_points(4, 23);
  ELReport r = el_metric::metric_el_residual(m.chart, m.frame, pts, nullptr, el_metric::LambdaMode::Fit);
  CHECK(r.pass);
  CHECK(r.lambda == doctest::Approx(0.0).epsilon(1e-8));

  Chart c = m.chart;
  c.metric_fn = [](const double* x, double* g) {
    for (int i = 0; i < 9; ++i) g[i] = 0.0;
    g[0] = 1.0;
    g[4] = 1.0 + 0.3 * std::sin(x[0]);
    g[8] = 1.0;
  };
  AdaptedFrameField f = distributions::build_adapted_frame(c, m.split);
  ELReport r2 = el_metric::metric_el_residual(c, f, pts, nullptr, el_metric::LambdaMode::Fit, 0.0, 1e-6);
  CHECK_FALSE(r2.pass);
  CHECK(r2.max_residual > 1e-3);
}

TEST_CASE("el residual is invariant under block-respecting reframing") {
  ModelInstance m = model_zoo::instantiate("warped_paper_example", {});
  auto pts = m.sample_points(2, 29);
  ELReport r1 = el_metric::metric_el_residual(m.chart, m.frame, pts, nullptr, el_metric::LambdaMode::Fit);
  // rotate the 2-dim first block by a fixed angle
  SplitSpec rotated = m.split;
  double ca = std::cos(0.6), sa = std::sin(0.6);
  auto s0 = m.split.raw_spans[0];
  auto s1 = m.split.raw_spans[1];
  rotated.raw_spans[0] = [s0, s1, ca, sa](const double* x, double* v) {
    double a[4], b[4];
    s0(x, a);
    s1(x, b);
    for (int i = 0; i < 4; ++i) v[i] = ca * a[i] + sa * b[i];
  };
  rotated.raw_spans[1] = [s0, s1, ca, sa](const double* x, double* v) {
    double a[4], b[4];
    s0(x, a);
    s1(x, b);
    for (int i = 0; i < 4; ++i) v[i] = -sa * a[i] + ca * b[i];
  };
  AdaptedFrameField f2 = distributions::build_adapted_frame(m.chart, rotated);
  ELReport r2 = el_metric::metric_el_residual(m.chart, f2, pts, nullptr, el_metric::LambdaMode::Fit);
  CHECK(r1.max_residual == doctest::Approx(r2.max_residual).epsilon(1e-6).scale(1.0));
  CHECK(r1.lambda == doctest::Approx(r2.lambda).epsilon(1e-8).scale(1.0));
}

TEST_CASE("rho reduces to the printed two-block expressions") {
  ModelInstance m = model_zoo::instantiate("warped_paper_example", {});
  // treat it as a two-block split: merge the two one-dim blocks
  SplitSpec two = m.split;
  two.dims = {2, 2};
  AdaptedFrameField f = distributions::build_adapted_frame(m.chart, two);
  double x[4] = {1.0, 2.0, 0.15, -0.1};
  auto rho = el_metric::rho_at(m.chart, f, x);
  const int n = 4;
  // oracle: rho_1 = -(n1-1)/(n-2) Div(Ht - H), rho_2 = +(n2-1)/(n-2) Div(Ht - H)
  VectorFieldFn diff = [&](const double* p, double* out) {
    ExtrinsicData ex = distributions::extrinsic_at(m.chart, f, p);
    std::vector<double> v(4);
    for (int c = 0; c < 4; ++c)
      v[static_cast<std::size_t>(c)] = ex.H_tilde[0][static_cast<std::size_t>(c)] - ex.H[0][static_cast<std::size_t>(c)];
    ex.fr.to_coord(v.data(), out);
  };
  double dv = geometry::divergence_at(diff, m.chart, x);
  CHECK(rho[0] == doctest::Approx(-(2.0 - 1.0) / (n - 2.0) * dv).epsilon(5e-5).scale(1.0));
  CHECK(rho[1] == doctest::Approx(+(2.0 - 1.0) / (n - 2.0) * dv).epsilon(5e-5).scale(1.0));

  // unequal block dimensions: circle times twisted 3-torus
  std::vector<TwistedFactor> facs(2);
  facs[0].dim = 1;
  facs[0].lo = {0.0};
  facs[0].hi = {2.0 * M_PI};
  facs[0].periodic = {1};
  facs[1].dim = 3;
  facs[1].lo = {0.0, 0.0, 0.0};
  facs[1].hi = {2.0 * M_PI, 2.0 * M_PI, 2.0 * M_PI};
  facs[1].periodic = {1, 1, 1};
  std::vector<std::function<double(const double*)>> tws;
  tws.push_back([](const double*) { return 1.0; });
  tws.push_back([](const double* p) { return std::exp(0.3 * std::sin(p[0])); });
  ModelInstance tw = model_zoo::make_twisted_product(facs, tws);
  double y[4] = {1.1, 2.0, 3.0, 4.0};
  auto rho2 = el_metric::rho_at(tw.chart, tw.frame, y);
  VectorFieldFn diff2 = [&](const double* p, double* out) {
    ExtrinsicData ex = distributions::extrinsic_at(tw.chart, tw.frame, p);
    std::vector<double> v(4);
    for (int c = 0; c < 4; ++c)
      v[static_cast<std::size_t>(c)] = ex.H_tilde[0][static_cast<std::size_t>(c)] - ex.H[0][static_cast<std::size_t>(c)];
    ex.fr.to_coord(v.data(), out);
  };
  double d2 = geometry::divergence_at(diff2, tw.chart, y);
  CHECK(rho2[0] == doctest::Approx(0.0).epsilon(1e-8).scale(1.0));                       // n_1 = 1
  CHECK(rho2[1] == doctest::Approx((3.0 - 1.0) / 2.0 * d2).epsilon(5e-5).scale(1.0));    // n_2 = 3
}

TEST_CASE("rho vanishes on products and in dimension two") {
  ModelParams mp;
  mp.num["n"] = 3;
  ModelInstance m = model_zoo::instantiate("flat_torus", mp);
  double x[3] = {1.0, 2.0, 3.0};
  for (double v : el_metric::rho_at(m.chart, m.frame, x)) CHECK(std::fabs(v) < 1e-9);

  ModelParams m2;
  m2.num["n"] = 2;
  ModelInstance t2 = model_zoo::instantiate("flat_torus", m2);
  double y[2] = {1.0, 2.0};
  auto rho2 = el_metric::rho_at(t2.chart, t2.frame, y);
  for (double v : rho2) CHECK(v == 0.0);
}

TEST_CASE("block-diagonal ricci tensor reduces to the ricci tensor for one-dimensional splits") {
  ModelInstance m = model_zoo::instantiate("sphere3_lie", {});
  double x[3] = {0.1, 0.15, -0.12};
  Nd rd = el_metric::ric_D_at(m.chart, m.frame, x, nullptr);
  Nd ric = geometry::ricci_at(m.chart, x);
  FramePoint fr = m.frame.at(x);
  for (int a = 0; a < 3; ++a) {
    double want = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        want += fr.E[static_cast<std::size_t>(a) * 3 + i] * fr.E[static_cast<std::size_t>(a) * 3 + j] * ric.at(i, j);
    CHECK(rd.at(a, a) == doctest::Approx(want).epsilon(2e-5).scale(1.0));
  }
}
