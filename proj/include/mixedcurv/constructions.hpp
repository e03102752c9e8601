#pragma once

#include <cstdint>
#include <vector>

#include "mixedcurv/distributions.hpp"

namespace mixedcurv {

enum class FrameMatrixKind { Rotation3, Hadamard, Example4dim, Identity };

struct OrthogonalFrameMatrix {
  int k = 0;
  std::vector<double> a;        // row-major orthogonal matrix
  std::vector<int> permutation; // input ordering used (k = 3 sorts eigenvalues)
  FrameMatrixKind kind = FrameMatrixKind::Identity;
};

namespace constructions {

// +-1 matrix with H H^T = k I, by Sylvester doubling or the quadratic-residue
// construction for k = p + 1, p prime = 3 (mod 4). Exact integer arithmetic.
std::vector<std::int64_t> hadamard(int k);

// Orthogonal A with (A diag(r) A^T)_ii all equal. k = 3 uses the two-rotation
// construction; other k require a Hadamard matrix.
OrthogonalFrameMatrix equalize_ricci(const std::vector<double>& r);

// Three unit fields with equal Ricci diagonal on the product of a constant
// curvature surface and a circle; chart coordinates (theta, phi, t).
std::vector<VectorFieldFn> example_ex3dim_frame(double K);

// Rotates four orthonormal Ricci eigenfields into a frame with equal Ricci
// diagonal; eigenfield property is checked at the given sample points.
std::vector<VectorFieldFn> example_ex4dim_frame(const Chart& chart,
                                                const std::vector<VectorFieldFn>& eigenfields,
                                                const std::vector<std::vector<double>>& check_points,
                                                double tol = 1e-6);

}  // namespace constructions

}  // namespace mixedcurv
