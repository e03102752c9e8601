#include "mixedcurv/model_zoo.hpp"

#include <cmath>
#include <random>

#include "mixedcurv/errors.hpp"
#include "mixedcurv/functionals.hpp"

namespace mixedcurv {

std::vector<std::vector<double>> ModelInstance::sample_points(int count, std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  auto unit = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  std::vector<std::vector<double>> pts;
  pts.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    std::vector<double> x(static_cast<std::size_t>(chart.n));
    for (int a = 0; a < chart.n; ++a) {
      double lo = chart.lo[static_cast<std::size_t>(a)], hi = chart.hi[static_cast<std::size_t>(a)];
      if (chart.periodic[static_cast<std::size_t>(a)]) {
        x[static_cast<std::size_t>(a)] = lo + (hi - lo) * unit();
      } else {
        // keep well inside so nested stencils stay in the box
        double m = 0.12 * (hi - lo);
        x[static_cast<std::size_t>(a)] = lo + m + (hi - lo - 2 * m) * unit();
      }
    }
    pts.push_back(std::move(x));
  }
  return pts;
}

namespace model_zoo {

namespace {

struct Quat {
  double w = 0, x = 0, y = 0, z = 0;
};

Quat qmul(const Quat& a, const Quat& b) {
  return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
          a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
          a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
          a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

Quat qunit(int axis) {
  Quat q;
  if (axis == 0)
    q.x = 1;
  else if (axis == 1)
    q.y = 1;
  else
    q.z = 1;
  return q;
}

VectorFieldFn coordinate_field(int n, int axis) {
  return [n, axis](const double*, double* out) {
    for (int i = 0; i < n; ++i) out[i] = (i == axis) ? 1.0 : 0.0;
  };
}

ModelInstance flat_torus(int n, std::vector<int> dims) {
  if (dims.empty()) dims.assign(static_cast<std::size_t>(n), 1);
  int tot = 0;
  for (int d : dims) tot += d;
  if (tot != n) throw BadInput("flat_torus: split must sum to n");
  ModelInstance m;
  m.name = "flat_torus";
  m.chart.n = n;
  m.chart.lo.assign(static_cast<std::size_t>(n), 0.0);
  m.chart.hi.assign(static_cast<std::size_t>(n), 2.0 * M_PI);
  m.chart.periodic.assign(static_cast<std::size_t>(n), 1);
  m.chart.metric_fn = [n](const double*, double* g) {
    for (int i = 0; i < n * n; ++i) g[i] = 0.0;
    for (int i = 0; i < n; ++i) g[i * n + i] = 1.0;
  };
  m.split.dims = dims;
  for (int i = 0; i < n; ++i) m.split.raw_spans.push_back(coordinate_field(n, i));
  m.frame = distributions::build_adapted_frame(m.chart, m.split);
  std::vector<double> x0(static_cast<std::size_t>(n), 1.0);
  m.load_checks.add("mixed_scalar_origin", functionals::mixed_scalar_at(m.chart, m.frame, x0.data(), nullptr), 0.0, 1e-9);
  return m;
}

// product of a constant-curvature surface (curvature K) and a circle;
// coordinates (theta, phi, t)
ModelInstance surface_circle(double K) {
  if (K == 0.0) throw BadInput("surface_circle: K must be nonzero");
  ModelInstance m;
  m.name = "surface_circle";
  m.chart.n = 3;
  bool pos = K > 0;
  double rho = 1.0 / std::sqrt(std::fabs(K));
  m.chart.lo = {0.45, 0.0, 0.0};
  m.chart.hi = {pos ? M_PI - 0.45 : 1.9, 2.0 * M_PI, 2.0 * M_PI};
  m.chart.periodic = {0, 1, 1};
  m.chart.metric_fn = [rho, pos](const double* x, double* g) {
    double s = pos ? std::sin(x[0]) : std::sinh(x[0]);
    for (int i = 0; i < 9; ++i) g[i] = 0.0;
    g[0] = rho * rho;
    g[4] = rho * rho * s * s;
    g[8] = 1.0;
  };
  m.split.dims = {1, 1, 1};
  for (int i = 0; i < 3; ++i) m.split.raw_spans.push_back(coordinate_field(3, i));
  m.frame = distributions::build_adapted_frame(m.chart, m.split);

  std::vector<double> x0{pos ? 1.1 : 1.0, 0.7, 0.3};
  Nd ric = geometry::ricci_at(m.chart, x0.data());
  FramePoint fr = m.frame.at(x0.data());
  // e_theta, e_phi carry Ric = K, circle direction 0
  double r00 = 0.0, r11 = 0.0, r22 = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      r00 += fr.E[0 * 3 + i] * fr.E[0 * 3 + j] * ric.at(i, j);
      r11 += fr.E[1 * 3 + i] * fr.E[1 * 3 + j] * ric.at(i, j);
      r22 += fr.E[2 * 3 + i] * fr.E[2 * 3 + j] * ric.at(i, j);
    }
  m.load_checks.add("ric_xx", r00, K, 1e-6 * std::max(1.0, std::fabs(K)));
  m.load_checks.add("ric_yy", r11, K, 1e-6 * std::max(1.0, std::fabs(K)));
  m.load_checks.add("ric_tt", r22, 0.0, 1e-6 * std::max(1.0, std::fabs(K)));
  if (!m.load_checks.pass) throw BadInput("surface_circle failed its load checks");
  return m;
}

// round S^3 in stereographic coordinates with the Lie frame of right
// quaternion translations
ModelInstance sphere3_lie() {
  ModelInstance m;
  m.name = "sphere3_lie";
  const int n = 3;
  m.chart.n = n;
  m.chart.lo.assign(3, -0.55);
  m.chart.hi.assign(3, 0.55);
  m.chart.periodic.assign(3, 0);
  m.chart.metric_fn = [](const double* x, double* g) {
    double r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
    double f = 2.0 / (1.0 + r2);
    double c = f * f;
    for (int i = 0; i < 9; ++i) g[i] = 0.0;
    g[0] = g[4] = g[8] = c;
  };
  m.split.dims = {1, 1, 1};
  for (int a = 0; a < 3; ++a) {
    m.split.raw_spans.push_back([a](const double* x, double* out) {
      double r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
      double den = 1.0 + r2;
      Quat q{(1.0 - r2) / den, 2.0 * x[0] / den, 2.0 * x[1] / den, 2.0 * x[2] / den};
      Quat v = qmul(q, qunit(a));
      // pull back through the stereographic embedding: xdot = (1+r2)^2/4 J^T qdot
      double amb[4] = {v.w, v.x, v.y, v.z};
      double s = den * den / 4.0;
      for (int i = 0; i < 3; ++i) {
        double ji = -4.0 * x[i] / (den * den) * amb[0];
        for (int j = 0; j < 3; ++j) {
          double dji = 2.0 * ((i == j) ? 1.0 : 0.0) / den - 4.0 * x[j] * x[i] / (den * den);
          ji += dji * amb[j + 1];
        }
        out[i] = s * ji;
      }
    });
  }
  m.frame = distributions::build_adapted_frame(m.chart, m.split);
  std::vector<double> x0{0.12, -0.2, 0.31};
  m.load_checks.add("scalar_curvature", geometry::scalar_at(m.chart, x0.data()), 6.0, 1e-6);
  m.load_checks.add("mixed_scalar", functionals::mixed_scalar_at(m.chart, m.frame, x0.data(), nullptr), 3.0, 1e-6);
  // the raw spans must already be orthonormal at every point
  FramePoint fr = m.frame.at(x0.data());
  std::vector<double> va(3), vb(3);
  double worst = 0.0;
  for (int a = 0; a < 3; ++a) {
    m.split.raw_spans[static_cast<std::size_t>(a)](x0.data(), va.data());
    for (int b = 0; b < 3; ++b) {
      m.split.raw_spans[static_cast<std::size_t>(b)](x0.data(), vb.data());
      double want = (a == b) ? 1.0 : 0.0;
      worst = std::max(worst, std::fabs(fr.inner_coord(va.data(), vb.data()) - want));
    }
  }
  m.load_checks.add("lie_frame_orthonormal", worst, 0.0, 1e-10);
  if (!m.load_checks.pass) throw BadInput("sphere3_lie failed its load checks");
  return m;
}

// round S^7 with the quaternionic Reeb fields, stereographic coordinates
ModelInstance sasaki7() {
  ModelInstance m;
  m.name = "sasaki7";
  const int n = 7;
  m.chart.n = n;
  m.chart.lo.assign(7, -0.30);
  m.chart.hi.assign(7, 0.30);
  m.chart.periodic.assign(7, 0);
  m.chart.metric_fn = [n](const double* x, double* g) {
    double r2 = 0.0;
    for (int i = 0; i < n; ++i) r2 += x[i] * x[i];
    double f = 2.0 / (1.0 + r2);
    double c = f * f;
    for (int i = 0; i < n * n; ++i) g[i] = 0.0;
    for (int i = 0; i < n; ++i) g[i * n + i] = c;
  };

  auto reeb = [n](int axis) {
    return VectorFieldFn([n, axis](const double* x, double* out) {
      double r2 = 0.0;
      for (int i = 0; i < n; ++i) r2 += x[i] * x[i];
      double den = 1.0 + r2;
      double amb[8];
      amb[0] = (1.0 - r2) / den;
      for (int i = 0; i < 7; ++i) amb[i + 1] = 2.0 * x[i] / den;
      Quat p{amb[0], amb[1], amb[2], amb[3]};
      Quat q{amb[4], amb[5], amb[6], amb[7]};
      Quat pv = qmul(p, qunit(axis));
      Quat qv = qmul(q, qunit(axis));
      double vamb[8] = {pv.w, pv.x, pv.y, pv.z, qv.w, qv.x, qv.y, qv.z};
      double s = den * den / 4.0;
      for (int i = 0; i < n; ++i) {
        double ji = -4.0 * x[i] / (den * den) * vamb[0];
        for (int j = 0; j < n; ++j) {
          double dji = 2.0 * ((i == j) ? 1.0 : 0.0) / den - 4.0 * x[j] * x[i] / (den * den);
          ji += dji * vamb[j + 1];
        }
        out[i] = s * ji;
      }
    });
  };

  m.split.dims = {1, 1, 1, 4};
  for (int a = 0; a < 3; ++a) m.split.raw_spans.push_back(reeb(a));
  for (int i = 3; i < 7; ++i) m.split.raw_spans.push_back(coordinate_field(n, i));
  m.frame = distributions::build_adapted_frame(m.chart, m.split);

  SasakiStructure s;
  s.n4 = 4;
  for (int a = 0; a < 3; ++a) s.reeb.push_back(reeb(a));
  m.sasaki = s;

  std::vector<double> x0{0.05, -0.04, 0.06, 0.02, -0.03, 0.05, -0.06};
  m.load_checks.add("scalar_curvature", geometry::scalar_at(m.chart, x0.data()), 42.0, 2e-5);
  m.load_checks.add("mixed_scalar", functionals::mixed_scalar_at(m.chart, m.frame, x0.data(), nullptr), 15.0, 2e-5);
  if (!m.load_checks.pass) throw BadInput("sasaki7 failed its load checks");
  return m;
}

std::function<double(const double*)> const_twist() {
  return [](const double*) { return 1.0; };
}

}  // namespace

ModelInstance make_twisted_product(const std::vector<TwistedFactor>& factors,
                                   const std::vector<std::function<double(const double*)>>& twists) {
  if (factors.size() != twists.size()) throw BadInput("one twist per factor required");
  ModelInstance m;
  m.name = "twisted_product";
  int n = 0;
  for (const auto& f : factors) n += f.dim;
  m.chart.n = n;
  m.chart.lo.resize(static_cast<std::size_t>(n));
  m.chart.hi.resize(static_cast<std::size_t>(n));
  m.chart.periodic.resize(static_cast<std::size_t>(n));
  int off = 0;
  for (const auto& f : factors) {
    for (int i = 0; i < f.dim; ++i) {
      m.chart.lo[static_cast<std::size_t>(off + i)] = f.lo[static_cast<std::size_t>(i)];
      m.chart.hi[static_cast<std::size_t>(off + i)] = f.hi[static_cast<std::size_t>(i)];
      m.chart.periodic[static_cast<std::size_t>(off + i)] = f.periodic[static_cast<std::size_t>(i)];
    }
    off += f.dim;
  }
  auto facs = factors;
  auto tws = twists;
  m.chart.metric_fn = [facs, tws, n](const double* x, double* g) {
    for (int i = 0; i < n * n; ++i) g[i] = 0.0;
    int o = 0;
    for (std::size_t fi = 0; fi < facs.size(); ++fi) {
      const auto& f = facs[fi];
      double u = tws[fi](x);
      if (u <= 0.0) throw BadInput("twist function must be positive");
      double u2 = u * u;
      if (f.metric) {
        std::vector<double> gf(static_cast<std::size_t>(f.dim) * f.dim);
        f.metric(x + o, gf.data());
        for (int i = 0; i < f.dim; ++i)
          for (int j = 0; j < f.dim; ++j)
            g[(o + i) * n + (o + j)] = u2 * gf[static_cast<std::size_t>(i) * f.dim + j];
      } else {
        for (int i = 0; i < f.dim; ++i) g[(o + i) * n + (o + i)] = u2;
      }
      o += f.dim;
    }
  };
  for (const auto& f : factors) m.split.dims.push_back(f.dim);
  for (int i = 0; i < n; ++i) m.split.raw_spans.push_back(coordinate_field(n, i));
  m.frame = distributions::build_adapted_frame(m.chart, m.split);

  // mean curvature against the closed form -n_mu P_perp grad(log u_mu)
  std::vector<double> x0(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    x0[static_cast<std::size_t>(i)] = 0.5 * (m.chart.lo[static_cast<std::size_t>(i)] + m.chart.hi[static_cast<std::size_t>(i)]) + 0.05;
  ExtrinsicData ex = distributions::extrinsic_at(m.chart, m.frame, x0.data());
  double worst = 0.0;
  for (int mu = 0; mu < ex.k; ++mu) {
    auto logu = [&tws, mu](const double* p, double* out) { out[0] = std::log(tws[static_cast<std::size_t>(mu)](p)); };
    std::vector<double> dlog = geometry::partials(logu, 1, m.chart, x0.data());
    // grad(log u) = g^{ij} d_j log u
    std::vector<double> ginv = geometry::metric_inverse_at(m.chart, x0.data());
    std::vector<double> grad(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        grad[static_cast<std::size_t>(i)] += ginv[static_cast<std::size_t>(i) * n + j] * dlog[static_cast<std::size_t>(j)];
    const FramePoint& fr = ex.fr;
    double nmu = fr.dims[static_cast<std::size_t>(mu)];
    for (int c = 0; c < n; ++c) {
      double expct = 0.0;
      if (!fr.in_block(c, mu)) expct = -nmu * fr.frame_comp(grad.data(), c);
      worst = std::max(worst, std::fabs(ex.H[static_cast<std::size_t>(mu)][static_cast<std::size_t>(c)] - expct));
    }
  }
  m.load_checks.add("mean_curvature_vs_twist", worst, 0.0, 1e-6);
  if (!m.load_checks.pass) throw BadInput("twisted product failed its load checks");
  return m;
}

namespace {

ModelInstance twisted_3d() {
  std::vector<TwistedFactor> facs(3);
  for (auto& f : facs) {
    f.dim = 1;
    f.lo = {0.0};
    f.hi = {2.0 * M_PI};
    f.periodic = {1};
  }
  std::vector<std::function<double(const double*)>> tws;
  tws.push_back(const_twist());
  tws.push_back([](const double* x) { return std::exp(0.20 * std::sin(x[0])); });
  tws.push_back([](const double* x) { return std::exp(0.15 * std::cos(x[0]) + 0.10 * std::sin(x[1])); });
  ModelInstance m = make_twisted_product(facs, tws);
  m.name = "twisted_3d";
  return m;
}

// M1 x R x R with metric g1 + u2(s)^2 dt^2 + u3(t)^2 ds^2; the flat-surface
// condition (linear twists) makes the pair critical with lambda = 0.
ModelInstance warped_paper_example(double f1, double f2, double quad) {
  ModelInstance m;
  m.name = quad == 0.0 ? "warped_paper_example" : "warped_paper_perturbed";
  const int n = 4;  // (x1, x2, t, s)
  m.chart.n = n;
  m.chart.lo = {0.0, 0.0, -0.8, -0.8};
  m.chart.hi = {2.0 * M_PI, 2.0 * M_PI, 0.8, 0.8};
  m.chart.periodic = {1, 1, 0, 0};
  m.chart.metric_fn = [f1, f2, quad](const double* x, double* g) {
    double t = x[2], s = x[3];
    double u2 = 1.0 + f1 * s + quad * s * s;
    double u3 = 1.0 + f2 * t;
    for (int i = 0; i < 16; ++i) g[i] = 0.0;
    g[0] = g[5] = 1.0;
    g[10] = u2 * u2;
    g[15] = u3 * u3;
  };
  m.split.dims = {2, 1, 1};
  for (int i = 0; i < 4; ++i) m.split.raw_spans.push_back(coordinate_field(4, i));
  m.frame = distributions::build_adapted_frame(m.chart, m.split);
  std::vector<double> x0{1.0, 2.0, 0.1, -0.2};
  double smix = functionals::mixed_scalar_at(m.chart, m.frame, x0.data(), nullptr);
  if (quad == 0.0) m.load_checks.add("mixed_scalar_flat_surface", smix, 0.0, 1e-6);
  if (!m.load_checks.pass) throw BadInput("warped_paper_example failed its load checks");
  return m;
}

}  // namespace

std::vector<std::string> model_names() {
  return {"flat_torus", "surface_circle", "sphere3_lie", "sasaki7", "warped_paper_example",
          "warped_paper_perturbed", "twisted_3d"};
}

std::string describe(const std::string& name) {
  if (name == "flat_torus") return "flat n-torus, params: n (default 3), split dims (default all ones)";
  if (name == "surface_circle") return "constant-curvature surface times circle, params: K (default 1)";
  if (name == "sphere3_lie") return "round S^3 with the right-translation Lie frame, split (1,1,1)";
  if (name == "sasaki7") return "round S^7 with three Reeb fields, split (1,1,1,4)";
  if (name == "warped_paper_example")
    return "T^2 x R x R with block-linear twists, params: f1 (default 0.3), f2 (default 0.2)";
  if (name == "warped_paper_perturbed")
    return "warped_paper_example with a quadratic twist defect, params: f1, f2, q (default 0.25)";
  if (name == "twisted_3d") return "three circles with generic positive twists";
  throw Unsupported("unknown model '" + name + "'");
}

ModelInstance instantiate(const std::string& name, const ModelParams& params) {
  if (name == "flat_torus") {
    int n = static_cast<int>(params.get("n", 3));
    return flat_torus(n, params.dims);
  }
  if (name == "surface_circle") return surface_circle(params.get("K", 1.0));
  if (name == "sphere3_lie") return sphere3_lie();
  if (name == "sasaki7") return sasaki7();
  if (name == "warped_paper_example")
    return warped_paper_example(params.get("f1", 0.3), params.get("f2", 0.2), 0.0);
  if (name == "warped_paper_perturbed")
    return warped_paper_example(params.get("f1", 0.3), params.get("f2", 0.2), params.get("q", 0.25));
  if (name == "twisted_3d") return twisted_3d();
  throw Unsupported("unknown model '" + name + "'");
}

}  // namespace model_zoo
}  // namespace mixedcurv
