// Batch front-end: parse a JSON manifest describing model + connection +
// checks, run the requested residual suites, and emit a machine-readable
// report. Exit codes: 0 all suites pass, 2 manifest/parse error, 3 numerical
// failure (a suite exceeded its tolerance), 4 internal error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "mixedcurv/constructions.hpp"
#include "mixedcurv/el_contorsion.hpp"
#include "mixedcurv/errors.hpp"
#include "mixedcurv/expr.hpp"
#include "mixedcurv/kernels.hpp"
#include "mixedcurv/model_zoo.hpp"
#include "mixedcurv/threads.hpp"

using json = nlohmann::ordered_json;
using namespace mixedcurv;

namespace {

struct CliError {
  int code;
  std::string message;
};

[[noreturn]] void manifest_error(const std::string& msg) { throw CliError{2, msg}; }

void require_known_keys(const json& obj, const std::vector<std::string>& allowed, const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const auto& k : allowed)
      if (it.key() == k) ok = true;
    if (!ok) manifest_error("unknown key '" + it.key() + "' in " + where);
  }
}

// deterministic smooth random fields: sums of low-frequency trig terms
double rng_unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0; }

VectorFieldFn random_vector_field(int n, std::uint64_t seed, double amplitude) {
  std::mt19937_64 rng(seed);
  struct Term {
    int comp, axis;
    double c_sin, c_cos;
  };
  auto terms = std::make_shared<std::vector<Term>>();
  for (int c = 0; c < n; ++c)
    for (int a = 0; a < n; ++a)
      terms->push_back({c, a, amplitude * rng_unit(rng), amplitude * rng_unit(rng)});
  return [n, terms](const double* x, double* out) {
    for (int i = 0; i < n; ++i) out[i] = 0.0;
    for (const auto& t : *terms) out[t.comp] += t.c_sin * std::sin(x[t.axis]) + t.c_cos * std::cos(x[t.axis]);
  };
}

ContorsionField random_statistical(int n, std::uint64_t seed, double amplitude) {
  std::mt19937_64 rng(seed);
  struct Term {
    int a, b, c, axis;
    double w;
  };
  auto terms = std::make_shared<std::vector<Term>>();
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b)
      for (int c = b; c < n; ++c)
        for (int axis = 0; axis < std::min(n, 2); ++axis)
          terms->push_back({a, b, c, axis, amplitude * rng_unit(rng)});
  auto cfn = [terms](const double* x, const FramePoint& fr, Nd& out) {
    out.reshape({fr.n, fr.n, fr.n});
    for (const auto& t : *terms) {
      double v = t.w * (1.0 + 0.5 * std::sin(x[t.axis]));
      int tri[3] = {t.a, t.b, t.c};
      int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
      for (auto& p : perms) out.at(tri[p[0]], tri[p[1]], tri[p[2]]) = v;
    }
  };
  return contorsion::make_statistical(cfn);
}

ContorsionField random_skew(int n, std::uint64_t seed, double amplitude) {
  std::mt19937_64 rng(seed);
  struct Term {
    int a, b, c;
    double w;
  };
  auto terms = std::make_shared<std::vector<Term>>();
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int c = b + 1; c < n; ++c) terms->push_back({a, b, c, amplitude * rng_unit(rng)});
  auto tfn = [terms](const double* x, const FramePoint& fr, Nd& out) {
    (void)x;
    out.reshape({fr.n, fr.n, fr.n});
    for (const auto& t : *terms) {
      int tri[3] = {t.a, t.b, t.c};
      int perms[6][3] = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}, {0, 2, 1}, {2, 1, 0}, {1, 0, 2}};
      for (int p = 0; p < 6; ++p) {
        double sgn = p < 3 ? 1.0 : -1.0;
        out.at(tri[perms[p][0]], tri[perms[p][1]], tri[perms[p][2]]) = sgn * t.w;
      }
    }
  };
  return contorsion::make_skew(tfn);
}

struct LoadedManifest {
  ModelInstance model;
  std::unique_ptr<ContorsionField> connection;
  ContorsionFlavor flavor = ContorsionFlavor::Generic;
  bool has_connection = false;
  json checks;
  int samples = 20;
  std::uint64_t seed = 1;
  int grid_periodic = 32, grid_open = 33;
};

LoadedManifest load_manifest(const json& j) {
  require_known_keys(j, {"model", "split", "connection", "checks", "grid", "samples", "seed", "threads"},
                     "manifest root");
  LoadedManifest out;
  if (!j.contains("model")) manifest_error("manifest needs a 'model'");
  const json& jm = j["model"];

  if (jm.contains("inline")) {
    require_known_keys(jm, {"inline"}, "model");
    const json& ji = jm["inline"];
    require_known_keys(ji, {"dim", "box", "periodic", "metric"}, "model.inline");
    Chart c;
    c.n = ji.at("dim").get<int>();
    for (const auto& b : ji.at("box")) {
      c.lo.push_back(b.at(0).get<double>());
      c.hi.push_back(b.at(1).get<double>());
    }
    for (const auto& p : ji.at("periodic")) c.periodic.push_back(p.get<bool>() ? 1 : 0);
    if (static_cast<int>(c.lo.size()) != c.n || static_cast<int>(c.periodic.size()) != c.n)
      manifest_error("box/periodic must have one entry per dimension");
    auto exprs = std::make_shared<std::vector<Expr>>();
    const json& jmetric = ji.at("metric");
    if (static_cast<int>(jmetric.size()) != c.n) manifest_error("metric must be an n x n matrix of expressions");
    for (const auto& row : jmetric) {
      if (static_cast<int>(row.size()) != c.n) manifest_error("metric must be an n x n matrix of expressions");
      for (const auto& e : row) exprs->push_back(Expr::parse(e.get<std::string>(), c.n));
    }
    int n = c.n;
    c.metric_fn = [exprs, n](const double* x, double* g) {
      for (int i = 0; i < n * n; ++i) g[i] = (*exprs)[static_cast<std::size_t>(i)].eval(x);
    };
    out.model.name = "inline";
    out.model.chart = c;
    std::vector<int> dims;
    if (j.contains("split")) {
      for (const auto& d : j["split"]) dims.push_back(d.get<int>());
    } else {
      dims.assign(static_cast<std::size_t>(n), 1);
    }
    out.model.split.dims = dims;
    for (int i = 0; i < n; ++i)
      out.model.split.raw_spans.push_back([n, i](const double*, double* v) {
        for (int q = 0; q < n; ++q) v[q] = (q == i) ? 1.0 : 0.0;
      });
    out.model.frame = distributions::build_adapted_frame(out.model.chart, out.model.split);
  } else {
    require_known_keys(jm, {"name", "params", "dims"}, "model");
    ModelParams mp;
    if (jm.contains("params"))
      for (auto it = jm["params"].begin(); it != jm["params"].end(); ++it)
        mp.num[it.key()] = it.value().get<double>();
    if (jm.contains("dims"))
      for (const auto& d : jm["dims"]) mp.dims.push_back(d.get<int>());
    try {
      out.model = model_zoo::instantiate(jm.at("name").get<std::string>(), mp);
    } catch (const Unsupported& e) {
      manifest_error(e.what());
    }
  }

  if (j.contains("grid")) {
    require_known_keys(j["grid"], {"periodic_nodes", "open_nodes"}, "grid");
    if (j["grid"].contains("periodic_nodes")) out.grid_periodic = j["grid"]["periodic_nodes"].get<int>();
    if (j["grid"].contains("open_nodes")) out.grid_open = j["grid"]["open_nodes"].get<int>();
  }
  if (j.contains("samples")) out.samples = j["samples"].get<int>();
  if (j.contains("seed")) out.seed = j["seed"].get<std::uint64_t>();

  if (j.contains("connection")) {
    const json& jc = j["connection"];
    require_known_keys(jc, {"flavor", "seed", "amplitude", "u"}, "connection");
    std::string flavor = jc.value("flavor", "none");
    std::uint64_t cseed = jc.value("seed", out.seed);
    double amp = jc.value("amplitude", 0.1);
    int n = out.model.chart.n;
    if (flavor == "none") {
      out.has_connection = false;
    } else if (flavor == "statistical") {
      out.connection = std::make_unique<ContorsionField>(random_statistical(n, cseed, amp));
      out.has_connection = true;
    } else if (flavor == "skew") {
      out.connection = std::make_unique<ContorsionField>(random_skew(n, cseed, amp));
      out.has_connection = true;
    } else if (flavor == "semi_symmetric") {
      VectorFieldFn u;
      if (jc.contains("u")) {
        auto exprs = std::make_shared<std::vector<Expr>>();
        for (const auto& e : jc["u"]) exprs->push_back(Expr::parse(e.get<std::string>(), n));
        if (static_cast<int>(exprs->size()) != n) manifest_error("connection.u needs one expression per coordinate");
        u = [exprs, n](const double* x, double* v) {
          for (int i = 0; i < n; ++i) v[i] = (*exprs)[static_cast<std::size_t>(i)].eval(x);
        };
      } else {
        u = random_vector_field(n, cseed, amp);
      }
      out.connection = std::make_unique<ContorsionField>(contorsion::make_semi_symmetric(u));
      out.has_connection = true;
    } else {
      manifest_error("unknown connection flavor '" + flavor + "'");
    }
    if (out.has_connection) out.flavor = out.connection->flavor;
  }

  if (!j.contains("checks")) manifest_error("manifest needs 'checks'");
  out.checks = j["checks"];
  return out;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

json point_to_json(const std::vector<double>& p) {
  json arr = json::array();
  for (double v : p) arr.push_back(v);
  return arr;
}

json run_suite(const LoadedManifest& lm, const json& jcheck, bool& ok) {
  std::string suite = jcheck.at("suite").get<std::string>();
  double tol = jcheck.value("tol", 1e-5);
  const ModelInstance& m = lm.model;
  const ContorsionField* I = lm.has_connection ? lm.connection.get() : nullptr;
  auto pts = m.sample_points(lm.samples, lm.seed);

  json rep;
  rep["suite"] = suite;
  double max_res = 0.0;
  json witness;
  bool pass = true;

  if (suite == "divergence_identity") {
    for (std::size_t i = 0; i < pts.size(); ++i) {
      double r = functionals::divergence_identity_residual(m.chart, m.frame, pts[i].data(), I);
      if (r > max_res) {
        max_res = r;
        witness["point"] = point_to_json(pts[i]);
        witness["equation"] = "divergence_identity";
      }
    }
    pass = max_res < tol;
  } else if (suite == "decomposition") {
    for (std::size_t i = 0; i < pts.size(); ++i) {
      double s2 = 2.0 * functionals::mixed_scalar_at(m.chart, m.frame, pts[i].data(), I);
      double sum = 0.0;
      for (int mu = 0; mu < m.split.k(); ++mu)
        sum += functionals::pair_mixed_scalar_at(m.chart, m.frame, pts[i].data(), mu, I);
      double r = std::fabs(s2 - sum);
      if (r > max_res) {
        max_res = r;
        witness["point"] = point_to_json(pts[i]);
        witness["equation"] = "pair_decomposition";
      }
    }
    pass = max_res < tol;
  } else if (suite == "one_dim_reduction") {
    for (std::size_t i = 0; i < pts.size(); ++i) {
      double s2 = 2.0 * functionals::mixed_scalar_at(m.chart, m.frame, pts[i].data(), nullptr);
      double s = geometry::scalar_at(m.chart, pts[i].data());
      double r = std::fabs(s2 - s);
      if (r > max_res) {
        max_res = r;
        witness["point"] = point_to_json(pts[i]);
        witness["equation"] = "one_dim_reduction";
      }
    }
    pass = max_res < tol;
  } else if (suite == "structure_flags") {
    StructureFlags f = distributions::structure_flags(m.chart, m.frame, pts, tol);
    json flags;
    for (int mu = 0; mu < m.split.k(); ++mu) {
      json fj;
      fj["integrable"] = static_cast<bool>(f.integrable[static_cast<std::size_t>(mu)]);
      fj["totally_geodesic"] = static_cast<bool>(f.totally_geodesic[static_cast<std::size_t>(mu)]);
      fj["umbilical"] = static_cast<bool>(f.umbilical[static_cast<std::size_t>(mu)]);
      fj["harmonic"] = static_cast<bool>(f.harmonic[static_cast<std::size_t>(mu)]);
      flags.push_back(fj);
    }
    rep["flags"] = flags;
    pass = true;
  } else if (suite == "metric_el") {
    ELReport r = el_metric::metric_el_residual(m.chart, m.frame, pts, I, el_metric::LambdaMode::Fit, 0.0, tol);
    max_res = r.max_residual;
    rep["lambda"] = r.lambda;
    witness["point"] = point_to_json(r.worst_point);
    witness["mu"] = r.worst_mu;
    pass = r.pass;
  } else if (suite == "twisted_el") {
    std::string casename = jcheck.value("case", "auto");
    TwistedCase tc = TwistedCase::General;
    if (casename == "auto") {
      bool all_one = true, any_one = false;
      for (int d : m.split.dims) {
        if (d == 1) any_one = true;
        else all_one = false;
      }
      tc = all_one ? TwistedCase::AllOneDim : (any_one ? TwistedCase::MixedDims : TwistedCase::General);
    } else if (casename == "general") {
      tc = TwistedCase::General;
    } else if (casename == "mixed_dims") {
      tc = TwistedCase::MixedDims;
    } else if (casename == "all_one_dim") {
      tc = TwistedCase::AllOneDim;
    } else {
      manifest_error("unknown twisted_el case '" + casename + "'");
    }
    ELReport r = special_geometries::twisted_el_residual(m.chart, m.frame, pts, I, tc, tol);
    max_res = r.max_residual;
    rep["lambda"] = r.lambda;
    witness["point"] = point_to_json(r.worst_point);
    witness["mu"] = r.worst_mu;
    pass = r.pass;
  } else if (suite == "contorsion_el") {
    if (!I) manifest_error("contorsion_el needs a connection");
    for (std::size_t i = 0; i < pts.size(); ++i) {
      auto r = el_contorsion::contorsion_el_residuals_at(m.chart, m.frame, pts[i].data(), *I);
      if (r.max_all() > max_res) {
        max_res = r.max_all();
        witness["point"] = point_to_json(pts[i]);
      }
    }
    pass = max_res < tol;
  } else if (suite == "stat_el") {
    if (!I) manifest_error("stat_el needs a statistical connection");
    for (std::size_t i = 0; i < pts.size(); ++i) {
      auto r = el_contorsion::stat_el_residuals_at(m.chart, m.frame, pts[i].data(), *I);
      if (r.max_all() > max_res) {
        max_res = r.max_all();
        witness["point"] = point_to_json(pts[i]);
      }
    }
    pass = max_res < tol;
  } else if (suite == "corI") {
    if (!I) manifest_error("corI needs a connection");
    CheckReport r = el_contorsion::corI_check(m.chart, m.frame, pts, *I, tol);
    json lines = json::array();
    for (const auto& l : r.lines) {
      json lj;
      lj["name"] = l.name;
      lj["measured"] = l.measured;
      lj["pass"] = l.pass;
      lines.push_back(lj);
      max_res = std::max(max_res, std::fabs(l.measured - l.expected));
    }
    rep["lines"] = lines;
    pass = r.pass;
  } else if (suite == "semi_symmetric_critical") {
    if (!I || I->flavor != ContorsionFlavor::SemiSymmetric)
      manifest_error("semi_symmetric_critical needs a semi_symmetric connection");
    for (std::size_t i = 0; i < pts.size(); ++i) {
      auto r = special_geometries::semi_symmetric_critical_residual(m.chart, m.frame, pts[i].data(), I->u);
      double mr = 0.0;
      for (double v : r) mr = std::max(mr, std::fabs(v));
      if (mr > max_res) {
        max_res = mr;
        witness["point"] = point_to_json(pts[i]);
      }
    }
    pass = max_res < tol;
  } else if (suite == "semi_symmetric_el") {
    if (!I || I->flavor != ContorsionFlavor::SemiSymmetric)
      manifest_error("semi_symmetric_el needs a semi_symmetric connection");
    ELReport r = special_geometries::semi_symmetric_metric_el_residual(m.chart, m.frame, pts, I->u,
                                                                       el_metric::LambdaMode::Fit, 0.0, tol);
    max_res = r.max_residual;
    rep["lambda"] = r.lambda;
    witness["point"] = point_to_json(r.worst_point);
    pass = r.pass;
  } else if (suite == "sasaki_identities") {
    if (!m.sasaki) manifest_error("sasaki_identities needs a Sasaki model");
    CheckReport r = special_geometries::sasaki_identities_check(m.chart, m.frame, *m.sasaki, pts, tol);
    json lines = json::array();
    for (const auto& l : r.lines) {
      json lj;
      lj["name"] = l.name;
      lj["measured"] = l.measured;
      lj["expected"] = l.expected;
      lj["pass"] = l.pass;
      lines.push_back(lj);
      max_res = std::max(max_res, std::fabs(l.measured - l.expected));
    }
    rep["lines"] = lines;
    pass = r.pass;
  } else if (suite == "sasaki_el") {
    if (!m.sasaki) manifest_error("sasaki_el needs a Sasaki model");
    auto r = special_geometries::sasaki_el_residual(m.chart, m.frame, *m.sasaki, pts, I, tol);
    max_res = r.report.max_residual;
    rep["lambda"] = r.report.lambda;
    rep["traced_d4_constant"] = r.traced_d4_constant;
    rep["traced_abc_constant"] = r.traced_abc_constant;
    rep["traced_mismatch"] = r.mismatch;
    pass = r.report.pass;
  } else {
    manifest_error("unknown suite '" + suite + "'");
  }

  rep["status"] = pass ? "pass" : "fail";
  rep["max_residual"] = max_res;
  rep["tolerance"] = tol;
  if (!witness.is_null()) rep["witness"] = witness;
  ok = ok && pass;
  return rep;
}

int cmd_run(const std::vector<std::string>& args) {
  std::string manifest_path, out_path;
  bool timings = false, csv = false;
  int threads = 0;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a == "--out" && i + 1 < args.size()) {
      out_path = args[++i];
    } else if (a == "--threads" && i + 1 < args.size()) {
      threads = std::stoi(args[++i]);
    } else if (a == "--timings") {
      timings = true;
    } else if (a == "--csv") {
      csv = true;
    } else if (!a.empty() && a[0] != '-') {
      manifest_path = a;
    } else {
      throw CliError{2, "unknown flag '" + a + "'"};
    }
  }
  if (manifest_path.empty()) throw CliError{2, "run needs a manifest path"};
  if (threads == 0) {
    const char* env = std::getenv("MIXEDCURV_THREADS");
    if (env) threads = std::atoi(env);
  }
  if (threads > 0) set_thread_count(threads);

  std::ifstream in(manifest_path);
  if (!in) throw CliError{2, "cannot open manifest '" + manifest_path + "'"};
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw CliError{2, std::string("manifest parse error: ") + e.what()};
  }

  auto t0 = std::chrono::steady_clock::now();
  LoadedManifest lm = load_manifest(j);
  bool ok = true;
  json suites = json::array();
  json failed_witness;
  for (const auto& jc : lm.checks) {
    bool suite_ok = true;
    json rep = run_suite(lm, jc, suite_ok);
    if (!suite_ok && failed_witness.is_null() && rep.contains("witness")) failed_witness = rep["witness"];
    suites.push_back(rep);
    ok = ok && suite_ok;
  }

  json report;
  report["model"] = lm.model.name;
  report["seed"] = lm.seed;
  report["samples"] = lm.samples;
  report["suites"] = suites;
  report["status"] = ok ? "pass" : "fail";
  if (timings) {
    auto t1 = std::chrono::steady_clock::now();
    report["wall_time_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
  }

  std::string text;
  if (csv) {
    std::ostringstream os;
    os << "suite,status,max_residual,tolerance\n";
    for (const auto& s : suites)
      os << s["suite"].get<std::string>() << "," << s["status"].get<std::string>() << ","
         << format_double(s["max_residual"].get<double>()) << "," << format_double(s["tolerance"].get<double>())
         << "\n";
    text = os.str();
  } else {
    text = report.dump(2) + "\n";
  }
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(out_path);
    out << text;
  }
  if (!ok) {
    std::cerr << "numerical failure";
    if (!failed_witness.is_null()) std::cerr << " at witness " << failed_witness.dump();
    std::cerr << "\n";
    return 3;
  }
  return 0;
}

int cmd_model(const std::vector<std::string>& args) {
  if (args.empty()) throw CliError{2, "model needs 'list' or 'describe <name>'"};
  if (args[0] == "list") {
    for (const auto& n : model_zoo::model_names()) std::cout << n << "\n";
    return 0;
  }
  if (args[0] == "describe") {
    if (args.size() < 2) throw CliError{2, "model describe needs a name"};
    std::cout << model_zoo::describe(args[1]) << "\n";
    return 0;
  }
  throw CliError{2, "unknown model subcommand '" + args[0] + "'"};
}

int cmd_hadamard(const std::vector<std::string>& args) {
  if (args.empty()) throw CliError{2, "hadamard needs an order"};
  int k = std::stoi(args[0]);
  auto h = constructions::hadamard(k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) std::cout << (j ? " " : "") << (h[static_cast<std::size_t>(i) * k + j] > 0 ? "+1" : "-1");
    std::cout << "\n";
  }
  return 0;
}

int cmd_equalize(const std::vector<std::string>& args) {
  if (args.empty()) throw CliError{2, "equalize-ricci needs eigenvalues"};
  std::vector<double> r;
  for (const auto& a : args) r.push_back(std::stod(a));
  auto m = constructions::equalize_ricci(r);
  json out;
  out["k"] = m.k;
  json rows = json::array();
  for (int i = 0; i < m.k; ++i) {
    json row = json::array();
    for (int j = 0; j < m.k; ++j) row.push_back(m.a[static_cast<std::size_t>(i) * m.k + j]);
    rows.push_back(row);
  }
  out["matrix"] = rows;
  json diag = json::array();
  for (int i = 0; i < m.k; ++i) {
    double acc = 0.0;
    for (int j = 0; j < m.k; ++j)
      acc += m.a[static_cast<std::size_t>(i) * m.k + j] * r[static_cast<std::size_t>(j)] *
             m.a[static_cast<std::size_t>(i) * m.k + j];
    diag.push_back(acc);
  }
  out["equalized_diagonal"] = diag;
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_kernel(const std::vector<std::string>& args) {
  if (args.size() < 2) throw CliError{2, "kernel needs <model> <flavor>"};
  ModelInstance m = model_zoo::instantiate(args[0], {});
  ContorsionFlavor flavor;
  if (args[1] == "metric")
    flavor = ContorsionFlavor::MetricCompatible;
  else if (args[1] == "statistical")
    flavor = ContorsionFlavor::Statistical;
  else
    throw CliError{2, "kernel flavor must be 'metric' or 'statistical'"};
  auto pts = m.sample_points(4, 7);
  auto res = el_contorsion::critical_contorsion_kernel(m.chart, m.frame, pts, flavor);
  json out;
  out["model"] = args[0];
  out["flavor"] = args[1];
  out["dimension"] = res.dimension;
  out["unknowns"] = res.unknowns;
  out["infeasibility"] = res.infeasibility;
  std::cout << out.dump(2) << "\n";
  return 0;
}

void usage() {
  std::cout << "usage: mixedcurv <command> [args]\n"
               "  run <manifest.json> [--out path] [--threads N] [--csv] [--timings]\n"
               "  model list | model describe <name>\n"
               "  hadamard <k>\n"
               "  equalize-ricci <r1> <r2> ...\n"
               "  kernel <model> <metric|statistical>\n";
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  if (args.empty()) {
    usage();
    return 2;
  }
  std::string cmd = args[0];
  std::vector<std::string> rest(args.begin() + 1, args.end());
  try {
    if (cmd == "run") return cmd_run(rest);
    if (cmd == "model") return cmd_model(rest);
    if (cmd == "hadamard") return cmd_hadamard(rest);
    if (cmd == "equalize-ricci") return cmd_equalize(rest);
    if (cmd == "kernel") return cmd_kernel(rest);
    if (cmd == "--help" || cmd == "help") {
      usage();
      return 0;
    }
    std::cerr << "unknown command '" << cmd << "'\n";
    return 2;
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  } catch (const Unsupported& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const BadInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  }
}
