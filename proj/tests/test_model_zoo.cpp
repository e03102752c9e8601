#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mixedcurv/model_zoo.hpp"

using namespace mixedcurv;

TEST_CASE("every catalog model loads and passes its table") {
  for (const auto& name : model_zoo::model_names()) {
    ModelInstance m = model_zoo::instantiate(name, {});
    CHECK(m.load_checks.pass);
    CHECK_FALSE(model_zoo::describe(name).empty());
  }
  CHECK_THROWS_AS(model_zoo::instantiate("no_such_model", {}), Unsupported);
  CHECK_THROWS_AS(model_zoo::describe("no_such_model"), Unsupported);
}

TEST_CASE("sample points are deterministic and interior") {
  ModelInstance m = model_zoo::instantiate("sphere3_lie", {});
  auto p1 = m.sample_points(8, 42);
  auto p2 = m.sample_points(8, 42);
  CHECK(p1 == p2);
  for (const auto& p : p1) CHECK(m.chart.interior(p.data(), 2.0));
}

TEST_CASE("twisted product with unit twists is the metric product") {
  std::vector<TwistedFactor> facs(2);
  facs[0].dim = 1;
  facs[0].lo = {0.0};
  facs[0].hi = {2.0 * M_PI};
  facs[0].periodic = {1};
  facs[1] = facs[0];
  std::vector<std::function<double(const double*)>> tws(2, [](const double*) { return 1.0; });
  ModelInstance m = model_zoo::make_twisted_product(facs, tws);
  double x[2] = {1.0, 2.0};
  ExtrinsicData ex = distributions::extrinsic_at(m.chart, m.frame, x);
  for (int mu = 0; mu < 2; ++mu)
    for (int c = 0; c < 2; ++c) CHECK(std::fabs(ex.H[static_cast<std::size_t>(mu)][static_cast<std::size_t>(c)]) < 1e-10);
}

TEST_CASE("nonpositive twists are rejected") {
  std::vector<TwistedFactor> facs(2);
  facs[0].dim = 1;
  facs[0].lo = {0.0};
  facs[0].hi = {2.0 * M_PI};
  facs[0].periodic = {1};
  facs[1] = facs[0];
  std::vector<std::function<double(const double*)>> tws;
  tws.push_back([](const double*) { return 1.0; });
  tws.push_back([](const double* x) { return std::sin(x[0]); });  // changes sign
  CHECK_THROWS_AS(model_zoo::make_twisted_product(facs, tws), Error);
}

TEST_CASE("warped example mean curvatures and their complements") {
  ModelInstance m = model_zoo::instantiate("warped_paper_example", {});
  double x[4] = {1.0, 2.0, 0.2, -0.3};
  ExtrinsicData ex = distributions::extrinsic_at(m.chart, m.frame, x);
  // block 0 (the flat factor) is totally geodesic with vanishing complement
  // mean curvature
  for (int c = 0; c < 4; ++c) {
    CHECK(std::fabs(ex.H[0][static_cast<std::size_t>(c)]) < 1e-8);
    CHECK(std::fabs(ex.H_tilde[0][static_cast<std::size_t>(c)]) < 1e-8);
  }
  // one-dimensional factors have nonzero mean curvature
  double h1 = 0.0;
  for (int c = 0; c < 4; ++c) h1 = std::max(h1, std::fabs(ex.H[1][static_cast<std::size_t>(c)]));
  CHECK(h1 > 1e-3);
}

TEST_CASE("sasaki model carries the reeb structure") {
  ModelInstance m = model_zoo::instantiate("sasaki7", {});
  REQUIRE(m.sasaki.has_value());
  CHECK(m.sasaki->n4 == 4);
  auto pts = m.sample_points(2, 3);
  auto rep = special_geometries::sasaki_structure_check(m.chart, m.frame, *m.sasaki, pts, 1e-6);
  CHECK(rep.pass);
}
