#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mixedcurv/core_tensor.hpp"
#include "mixedcurv/nd.hpp"

namespace mixedcurv {

struct FdConfig {
  double step_rel = 1e-4;   // step = step_rel * axis extent
  bool richardson = true;   // one Richardson refinement
  double instab_tol = 1e-2; // relative disagreement between h and h/2 results
};

// Coordinate box with a metric-component callback. metric_fn writes the n x n
// matrix row-major; it must be symmetric and nondegenerate on the box.
struct Chart {
  int n = 0;
  std::vector<double> lo, hi;
  std::vector<std::uint8_t> periodic;
  std::function<void(const double*, double*)> metric_fn;
  int index_q = 0;
  FdConfig fd;

  double extent(int axis) const { return hi[static_cast<std::size_t>(axis)] - lo[static_cast<std::size_t>(axis)]; }
  double step(int axis) const { return fd.step_rel * extent(axis); }

  // Canonicalizes periodic coordinates before evaluating callbacks.
  void wrap(double* x) const;
  // Interior test for FD stencils: margin_steps * step(axis) from non-periodic
  // boundaries.
  bool interior(const double* x, double margin_steps) const;
};

using VectorFieldFn = std::function<void(const double*, double*)>;          // n components
using MatrixFieldFn = std::function<void(const double*, double*)>;          // n*n row-major
using TensorFieldFn = std::function<void(const double*, Nd&)>;              // arbitrary dense

namespace geometry {

std::vector<double> metric_at(const Chart& chart, const double* x);
std::vector<double> metric_inverse_at(const Chart& chart, const double* x);
double metric_det_at(const Chart& chart, const double* x);

// Christoffel symbols of the Levi-Civita connection; comps.at(i,j,k) = Gamma^k_ij.
Nd christoffel_at(const Chart& chart, const double* x);

// Curvature R(d_i, d_j) d_k = R^l_ijk d_l with the convention
// R_{X,Y} = [nabla_Y, nabla_X] + nabla_[X,Y]; comps.at(i,j,k,l) = R^l_ijk.
Nd riemann_at(const Chart& chart, const double* x);

// Ric(Y,Z) = sum_i eps_i <R_{E_i, Y} E_i, Z>; comps.at(j,k).
Nd ricci_at(const Chart& chart, const double* x);

double scalar_at(const Chart& chart, const double* x);

// Divergence of a vector field: div X = trace(nabla X).
double divergence_at(const VectorFieldFn& field, const Chart& chart, const double* x);

// Divergence of a (1,s)-tensor field given by coordinate components
// T.at(j1..js, l); returns the (0,s)-tensor (Div T).at(j1..js).
Nd divergence_tensor_at(const TensorFieldFn& field, int s, const Chart& chart, const double* x);

// Coordinate covariant derivative of a vector field: out.at(i,l) = (nabla_i X)^l.
Nd covariant_derivative_vector(const VectorFieldFn& field, const Chart& chart, const double* x);

// Coordinate covariant derivative of a (1,s) field: out.at(i, j1..js, l).
Nd covariant_derivative_tensor(const TensorFieldFn& field, int s, const Chart& chart, const double* x);

// Central-difference partial derivatives d/dx_i of an arbitrary callback
// writing `len` doubles; out.at? returned as vector of length n*len, row i =
// derivative along axis i. Applies Richardson refinement per chart.fd.
std::vector<double> partials(const std::function<void(const double*, double*)>& f, int len,
                             const Chart& chart, const double* x);

}  // namespace geometry

}  // namespace mixedcurv
