#include "mixedcurv/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mixedcurv/errors.hpp"
#include "mixedcurv/geometry.hpp"

namespace mixedcurv::constructions {

namespace {

bool is_prime(int p) {
  if (p < 2) return false;
  for (int d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

std::vector<std::int64_t> sylvester(int k) {
  std::vector<std::int64_t> h{1};
  int m = 1;
  while (m < k) {
    std::vector<std::int64_t> h2(static_cast<std::size_t>(2 * m) * (2 * m));
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        std::int64_t v = h[static_cast<std::size_t>(i) * m + j];
        h2[static_cast<std::size_t>(i) * 2 * m + j] = v;
        h2[static_cast<std::size_t>(i) * 2 * m + m + j] = v;
        h2[static_cast<std::size_t>(i + m) * 2 * m + j] = v;
        h2[static_cast<std::size_t>(i + m) * 2 * m + m + j] = -v;
      }
    h = std::move(h2);
    m *= 2;
  }
  return h;
}

// quadratic-residue construction for k = p + 1 with p prime, p = 3 (mod 4)
std::vector<std::int64_t> paley(int k) {
  int p = k - 1;
  std::vector<int> chi(static_cast<std::size_t>(p), -1);
  chi[0] = 0;
  for (int t = 1; t < p; ++t) chi[static_cast<std::size_t>((t * t) % p)] = 1;
  // skew part: A[0][j] = 1, A[i][0] = -1, A[i][j] = chi(i - j)
  std::vector<std::int64_t> h(static_cast<std::size_t>(k) * k, 0);
  auto H = [&](int i, int j) -> std::int64_t& { return h[static_cast<std::size_t>(i) * k + j]; };
  for (int j = 0; j < k; ++j) H(0, j) = 1;
  for (int i = 1; i < k; ++i) H(i, 0) = -1;
  for (int i = 1; i < k; ++i)
    for (int j = 1; j < k; ++j) {
      if (i == j) {
        H(i, j) = 1;
      } else {
        int d = ((i - j) % p + p) % p;
        H(i, j) = chi[static_cast<std::size_t>(d)];
      }
    }
  return h;
}

bool check_hadamard(const std::vector<std::int64_t>& h, int k) {
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      std::int64_t acc = 0;
      for (int m = 0; m < k; ++m) acc += h[static_cast<std::size_t>(i) * k + m] * h[static_cast<std::size_t>(j) * k + m];
      if (acc != (i == j ? static_cast<std::int64_t>(k) : 0)) return false;
    }
  return true;
}

}  // namespace

std::vector<std::int64_t> hadamard(int k) {
  if (k <= 0) throw Unsupported("hadamard order must be positive");
  if (k == 1) return {1};
  if (k == 2 || (k & (k - 1)) == 0) {
    auto h = sylvester(k);
    if (!check_hadamard(h, k)) throw Unsupported("internal construction failure");
    return h;
  }
  if (k % 4 == 0 && is_prime(k - 1) && (k - 1) % 4 == 3) {
    auto h = paley(k);
    if (!check_hadamard(h, k)) throw Unsupported("internal construction failure");
    return h;
  }
  throw Unsupported("no construction available for order " + std::to_string(k) +
                    " (supported: powers of two, and p+1 for primes p = 3 mod 4)");
}

OrthogonalFrameMatrix equalize_ricci(const std::vector<double>& r) {
  const int k = static_cast<int>(r.size());
  if (k < 2) throw BadInput("need at least two eigenvalues");
  OrthogonalFrameMatrix out;
  out.k = k;
  out.permutation.resize(static_cast<std::size_t>(k));
  std::iota(out.permutation.begin(), out.permutation.end(), 0);

  double spread = 0.0;
  for (double v : r) spread = std::max(spread, std::fabs(v - r[0]));
  if (spread < 1e-14) {
    out.a.assign(static_cast<std::size_t>(k) * k, 0.0);
    for (int i = 0; i < k; ++i) out.a[static_cast<std::size_t>(i) * k + i] = 1.0;
    out.kind = FrameMatrixKind::Identity;
    return out;
  }

  if (k == 3) {
    // order inputs so that r2 <= r3 < r1 (or r2 < r3 <= r1)
    std::vector<int> idx{0, 1, 2};
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return r[static_cast<std::size_t>(a)] < r[static_cast<std::size_t>(b)]; });
    int i2 = idx[0], i3 = idx[1], i1 = idx[2];
    out.permutation = {i1, i2, i3};
    double r1 = r[static_cast<std::size_t>(i1)], r2 = r[static_cast<std::size_t>(i2)], r3 = r[static_cast<std::size_t>(i3)];
    double c2 = (r1 - 2.0 * r2 + r3) / (3.0 * (r1 - r2));
    c2 = std::min(1.0, std::max(0.0, c2));
    double alpha = std::acos(std::sqrt(c2));
    double phi = M_PI / 4.0;
    double ca = std::cos(alpha), sa = std::sin(alpha);
    double cp = std::cos(phi), sp = std::sin(phi);
    // A = A2 A1 acting on the reordered eigenbasis (r1, r2, r3)
    double a1[9] = {ca, -sa, 0, sa, ca, 0, 0, 0, 1};
    double a2[9] = {1, 0, 0, 0, cp, -sp, 0, sp, cp};
    double prod[9];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double acc = 0.0;
        for (int m = 0; m < 3; ++m) acc += a2[i * 3 + m] * a1[m * 3 + j];
        prod[i * 3 + j] = acc;
      }
    // compose with the permutation so that A applies to the original ordering
    out.a.assign(9, 0.0);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        out.a[static_cast<std::size_t>(i) * 3 + static_cast<std::size_t>(out.permutation[static_cast<std::size_t>(j)])] = prod[i * 3 + j];
    out.kind = FrameMatrixKind::Rotation3;
    return out;
  }

  auto h = hadamard(k);
  double inv = 1.0 / std::sqrt(static_cast<double>(k));
  out.a.resize(static_cast<std::size_t>(k) * k);
  for (std::size_t i = 0; i < out.a.size(); ++i) out.a[i] = static_cast<double>(h[i]) * inv;
  out.kind = FrameMatrixKind::Hadamard;
  return out;
}

std::vector<VectorFieldFn> example_ex3dim_frame(double K) {
  if (K == 0.0) throw BadInput("K must be nonzero");
  bool pos = K > 0;
  double rho = 1.0 / std::sqrt(std::fabs(K));
  double a = 1.0 / std::sqrt(3.0);
  double b = 1.0 / std::sqrt(6.0);
  double c = 1.0 / std::sqrt(2.0);
  double ca = a;                       // cos(alpha) = 1/sqrt(3)
  double sa = std::sqrt(2.0 / 3.0);    // sin(alpha)

  // chart coordinates (theta, phi, t); unit fields e_x = e_theta,
  // e_y = e_phi, e_t = d_t
  auto ex = [rho](const double*, double* out) {
    out[0] = 1.0 / rho;
    out[1] = 0.0;
    out[2] = 0.0;
  };
  auto ey = [rho, pos](const double* x, double* out) {
    double s = pos ? std::sin(x[0]) : std::sinh(x[0]);
    out[0] = 0.0;
    out[1] = 1.0 / (rho * s);
    out[2] = 0.0;
  };

  std::vector<VectorFieldFn> f;
  f.push_back([ca, sa, ex](const double* x, double* out) {
    double vx[3];
    ex(x, vx);
    out[0] = sa * vx[0];
    out[1] = 0.0;
    out[2] = ca;
  });
  f.push_back([a, b, c, ex, ey](const double* x, double* out) {
    double vx[3], vy[3];
    ex(x, vx);
    ey(x, vy);
    for (int i = 0; i < 3; ++i) out[i] = b * vx[i] + c * vy[i];
    out[2] += -a;
  });
  f.push_back([a, b, c, ex, ey](const double* x, double* out) {
    double vx[3], vy[3];
    ex(x, vx);
    ey(x, vy);
    for (int i = 0; i < 3; ++i) out[i] = b * vx[i] - c * vy[i];
    out[2] += -a;
  });
  return f;
}

std::vector<VectorFieldFn> example_ex4dim_frame(const Chart& chart,
                                                const std::vector<VectorFieldFn>& eigenfields,
                                                const std::vector<std::vector<double>>& check_points,
                                                double tol) {
  if (eigenfields.size() != 4) throw BadInput("need four eigenfields");
  // verify: orthonormal and pointwise Ricci eigenfields
  for (const auto& p : check_points) {
    Nd ric = geometry::ricci_at(chart, p.data());
    std::vector<double> g = geometry::metric_at(chart, p.data());
    const int n = chart.n;
    std::vector<std::vector<double>> X(4, std::vector<double>(static_cast<std::size_t>(n)));
    for (int m = 0; m < 4; ++m) eigenfields[static_cast<std::size_t>(m)](p.data(), X[static_cast<std::size_t>(m)].data());
    for (int m = 0; m < 4; ++m)
      for (int l = 0; l < 4; ++l) {
        double ip = 0.0;
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j)
            ip += X[static_cast<std::size_t>(m)][static_cast<std::size_t>(i)] * g[static_cast<std::size_t>(i) * n + j] *
                  X[static_cast<std::size_t>(l)][static_cast<std::size_t>(j)];
        double want = (m == l) ? 1.0 : 0.0;
        if (std::fabs(ip - want) > tol) throw PreconditionFailed("eigenfields are not orthonormal");
      }
    for (int m = 0; m < 4; ++m) {
      // Ric(X, Y) = f <X, Y> for all frame Y <=> X is an eigenfield
      double f = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          f += X[static_cast<std::size_t>(m)][static_cast<std::size_t>(i)] * ric.at(i, j) * X[static_cast<std::size_t>(m)][static_cast<std::size_t>(j)];
      for (int l = 0; l < 4; ++l) {
        if (l == m) continue;
        double cross = 0.0;
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j)
            cross += X[static_cast<std::size_t>(m)][static_cast<std::size_t>(i)] * ric.at(i, j) * X[static_cast<std::size_t>(l)][static_cast<std::size_t>(j)];
        if (std::fabs(cross) > tol * std::max(1.0, std::fabs(f))) throw PreconditionFailed("field is not a Ricci eigphenfield");
      }
    }
  }

  static const double C[4][4] = {{0.5, 0.5, 0.5, 0.5},
                                 {-0.5, 0.5, -0.5, 0.5},
                                 {-0.5, -0.5, 0.5, 0.5},
                                 {0.5, -0.5, -0.5, 0.5}};
  std::vector<VectorFieldFn> out;
  for (int m = 0; m < 4; ++m) {
    auto xs = eigenfields;
    const double* row = C[m];
    out.push_back([xs, row](const double* x, double* v) {
      // dimension comes from the captured fields: evaluate the first to size
      double tmp[16];
      xs[0](x, tmp);
      // all charts used here are 4-dimensional
      double acc[4] = {0, 0, 0, 0};
      for (int q = 0; q < 4; ++q) {
        double w[4];
        xs[static_cast<std::size_t>(q)](x, w);
        for (int i = 0; i < 4; ++i) acc[i] += row[q] * w[i];
      }
      for (int i = 0; i < 4; ++i) v[i] = acc[i];
    });
  }
  return out;
}

}  // namespace mixedcurv::constructions
