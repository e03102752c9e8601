#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "mixedcurv/core_tensor.hpp"

using namespace mixedcurv;
using namespace mixedcurv::core_tensor;

namespace {

std::mt19937_64 rng(2024);
double uni() { return static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0; }

TensorValue random_tensor(int cov, int contra, int n, const std::string& tag = "f") {
  TensorValue t(cov, contra, n, tag);
  for (std::size_t i = 0; i < t.comps.size(); ++i) t.comps[i] = uni();
  return t;
}

}  // namespace

TEST_CASE("flat of a frame vector is the signed coordinate covector") {
  int n = 4;
  Signature sig = Signature::riemannian(n);
  TensorValue v(0, 1, n, "f");
  v.comps.at(0) = 1.0;
  TensorValue w = flat(v, sig);
  CHECK(w.comps.at(0) == doctest::Approx(1.0));
  for (int i = 1; i < n; ++i) CHECK(w.comps.at(i) == doctest::Approx(0.0));

  Signature lorentz(std::vector<double>{-1.0, 1.0, 1.0, 1.0});
  TensorValue wl = flat(v, lorentz);
  CHECK(wl.comps.at(0) == doctest::Approx(-1.0));
}

TEST_CASE("flat and sharp are mutually inverse, including with explicit metrics") {
  int n = 5;
  Signature sig = Signature::riemannian(n);
  for (int rep = 0; rep < 20; ++rep) {
    TensorValue v = random_tensor(0, 1, n);
    TensorValue w = sharp(flat(v, sig), sig);
    for (int i = 0; i < n; ++i) CHECK(w.comps.at(i) == doctest::Approx(v.comps.at(i)).epsilon(1e-12));
  }
  // random SPD metric
  std::vector<double> g(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double v = 0.0;
      for (int m = 0; m < n; ++m) v += (0.3 * ((i * 7 + m * 3) % 5 - 2)) * (0.3 * ((j * 7 + m * 3) % 5 - 2));
      g[static_cast<std::size_t>(i) * n + j] = v + ((i == j) ? 2.0 : 0.0);
    }
  for (int rep = 0; rep < 10; ++rep) {
    TensorValue om = random_tensor(1, 0, n);
    TensorValue back = flat(sharp(om, g, sig), g, sig);
    for (int i = 0; i < n; ++i) CHECK(back.comps.at(i) == doctest::Approx(om.comps.at(i)).epsilon(1e-10));
  }
}

TEST_CASE("flat rejects a singular metric") {
  int n = 3;
  Signature sig = Signature::riemannian(n);
  std::vector<double> g(9, 0.0);
  g[0] = 1.0;
  g[4] = 1.0;  // last row/column zero
  TensorValue v = random_tensor(0, 1, n);
  CHECK_THROWS_AS(flat(v, g, sig), DegenerateMetric);
}

TEST_CASE("inner of rank mismatch throws; frame mismatch throws") {
  int n = 3;
  Signature sig = Signature::riemannian(n);
  TensorValue a = random_tensor(2, 0, n);
  TensorValue b = random_tensor(1, 1, n);
  CHECK_THROWS_AS(inner(a, b, sig), ShapeError);
  TensorValue c = random_tensor(2, 0, n, "other");
  CHECK_THROWS_AS(inner(a, c, sig), FrameError);
}

TEST_CASE("inner of zero is zero; of the metric with itself is n") {
  int n = 6;
  Signature sig = Signature::riemannian(n);
  TensorValue h(2, 0, n, "f");
  TensorValue h2 = h;
  CHECK(inner(h, h2, sig) == doctest::Approx(0.0));
  TensorValue g(2, 0, n, "f");
  for (int i = 0; i < n; ++i) g.comps.at(i, i) = 1.0;
  CHECK(inner(g, g, sig) == doctest::Approx(static_cast<double>(n)));
}

TEST_CASE("inner of symmetric (0,2) tensors equals the matrix-trace oracle") {
  int n = 4;
  Signature sig = Signature::riemannian(n);
  for (int rep = 0; rep < 25; ++rep) {
    TensorValue b = random_tensor(2, 0, n);
    TensorValue c = random_tensor(2, 0, n);
    b = sym2(b);
    c = sym2(c);
    // oracle: tr(B^sharp C^sharp); orthonormal Riemannian frame keeps the
    // components unchanged under sharp
    double tr = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) tr += b.comps.at(i, j) * c.comps.at(j, i);
    CHECK(inner(b, c, sig) == doctest::Approx(tr).epsilon(1e-12));
  }
}

TEST_CASE("inner is symmetric and bilinear; positive in Riemannian signature") {
  int n = 3;
  Signature sig = Signature::riemannian(n);
  for (int rep = 0; rep < 10; ++rep) {
    TensorValue a = random_tensor(1, 1, n);
    TensorValue b = random_tensor(1, 1, n);
    CHECK(inner(a, b, sig) == doctest::Approx(inner(b, a, sig)));
    CHECK(inner(a, a, sig) >= 0.0);
  }
}

TEST_CASE("upsilon matches its defining pairing against random symmetric tensors") {
  int n = 4;
  std::vector<double> eps{1.0, 1.0, -1.0, 1.0};
  Signature sig{std::vector<double>(eps)};
  for (int rep = 0; rep < 10; ++rep) {
    TensorValue p = random_tensor(2, 1, n);
    TensorValue q = random_tensor(2, 1, n);
    TensorValue u = upsilon(p, q, sig);
    // oracle: loop the definition for random symmetric S
    for (int srep = 0; srep < 6; ++srep) {
      TensorValue S = sym2(random_tensor(2, 0, n));
      double lhs = inner(u, S, sig);
      double rhs = 0.0;
      for (int lam = 0; lam < n; ++lam)
        for (int mu = 0; mu < n; ++mu) {
          double w = eps[static_cast<std::size_t>(lam)] * eps[static_cast<std::size_t>(mu)];
          // S(P(e,e), Q(e,e)) + S(Q(e,e), P(e,e))
          double s1 = 0.0, s2 = 0.0;
          for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
              s1 += p.comps.at(lam, mu, i) * q.comps.at(lam, mu, j) * S.comps.at(i, j);
              s2 += q.comps.at(lam, mu, i) * p.comps.at(lam, mu, j) * S.comps.at(i, j);
            }
          rhs += w * (s1 + s2);
        }
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-11));
    }
  }
}

TEST_CASE("upsilon is symmetric in its arguments and produces a symmetric tensor") {
  int n = 5;
  Signature sig = Signature::riemannian(n);
  TensorValue p = random_tensor(2, 1, n);
  TensorValue q = random_tensor(2, 1, n);
  TensorValue u1 = upsilon(p, q, sig);
  TensorValue u2 = upsilon(q, p, sig);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      CHECK(u1.comps.at(i, j) == doctest::Approx(u2.comps.at(i, j)));
      CHECK(u1.comps.at(i, j) == doctest::Approx(u1.comps.at(j, i)));
    }
}

TEST_CASE("upsilon of zero vanishes") {
  int n = 4;
  Signature sig = Signature::riemannian(n);
  TensorValue z(2, 1, n, "f");
  TensorValue u = upsilon(z, z, sig);
  CHECK(max_abs(u) == doctest::Approx(0.0));
}

TEST_CASE("half upsilon of an umbilical form over a one-dim complement is the mean-curvature square") {
  // block {0,1,2}, complement {3}; h(E_a,E_b) = c delta_ab E_3
  int n = 4;
  int nmu = 3;
  double c = 0.7;
  Signature sig = Signature::riemannian(n);
  TensorValue h(2, 1, n, "f");
  for (int a = 0; a < nmu; ++a) h.comps.at(a, a, 3) = c;
  TensorValue uh = upsilon(h, h, sig);
  double H3 = nmu * c;  // trace of h
  CHECK(0.5 * uh.comps.at(3, 3) == doctest::Approx(H3 * H3 / nmu).epsilon(1e-12));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != 3 || j != 3) CHECK(uh.comps.at(i, j) == doctest::Approx(0.0));
}

TEST_CASE("upsilon of a nonzero umbilical form is nonzero in Riemannian signature") {
  int n = 3;
  Signature sig = Signature::riemannian(n);
  for (int rep = 0; rep < 10; ++rep) {
    TensorValue h(2, 1, n, "f");
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) h.comps.at(a, b, 2) = uni();
    h.comps.at(0, 1, 2) = h.comps.at(1, 0, 2);  // symmetric
    TensorValue u = upsilon(h, h, sig);
    double hmax = 0.0;
    for (std::size_t i = 0; i < h.comps.size(); ++i) hmax = std::max(hmax, std::fabs(h.comps[i]));
    if (hmax > 1e-10) CHECK(max_abs(u) > 0.0);
  }
}
