#pragma once

#include <memory>
#include <string>
#include <vector>

#include "mixedcurv/geometry.hpp"

namespace mixedcurv {

// k blocks spanning pairwise orthogonal distributions; raw_spans holds n
// vector fields grouped by block, in declared order.
struct SplitSpec {
  std::vector<int> dims;
  std::vector<VectorFieldFn> raw_spans;

  int k() const { return static_cast<int>(dims.size()); }
  int total() const {
    int t = 0;
    for (int d : dims) t += d;
    return t;
  }
};

// Pointwise adapted pseudo-orthonormal frame: E[i*n+c] is coordinate component
// c of frame vector i; vectors are grouped by block in declared order.
struct FramePoint {
  int n = 0;
  int k = 0;
  std::vector<int> dims, offset;
  std::vector<double> E;
  std::vector<double> eps;
  std::vector<double> g, ginv;

  int block_of(int i) const {
    for (int mu = 0; mu < k; ++mu)
      if (i < offset[static_cast<std::size_t>(mu)] + dims[static_cast<std::size_t>(mu)]) return mu;
    return -1;
  }
  bool in_block(int i, int mu) const {
    return i >= offset[static_cast<std::size_t>(mu)] &&
           i < offset[static_cast<std::size_t>(mu)] + dims[static_cast<std::size_t>(mu)];
  }
  const double* vec(int i) const { return &E[static_cast<std::size_t>(i) * n]; }

  // <v, w> for coordinate-component vectors
  double inner_coord(const double* v, const double* w) const;
  // frame component a of a coordinate vector: eps_a <w, E_a>
  double frame_comp(const double* w, int a) const;
  // expands frame components to coordinate components
  void to_coord(const double* frame_comps, double* out) const;
};

// Frame field built from a SplitSpec by block Gram-Schmidt at each point.
// Holds its own copy of the chart so the field stays valid independently of
// the chart object it was built from.
struct AdaptedFrameField {
  std::shared_ptr<const Chart> chart;
  SplitSpec split;
  std::string tag = "adapted";

  FramePoint at(const double* x) const;
  // raw component callback (n*n doubles) for finite differences of the frame
  void components(const double* x, double* out) const;
};

// Everything extrinsic about the splitting at one point, in frame components.
// Value tensors (n,n,n): at(a,b,c) = frame component c of X(E_a, E_b); entries
// vanish off the defining blocks. Operators (n,n): at(x,y) = component y of
// Op(E_x).
struct ExtrinsicData {
  int n = 0, k = 0;
  FramePoint fr;
  Nd nabla;                                    // at(a,b,l): coordinate comps of nabla_{E_a} E_b
  std::vector<Nd> h, T, h_tilde, T_tilde;      // per block
  std::vector<std::vector<double>> H, H_tilde; // frame comps
  std::vector<Nd> casorati_t, casorati_k;      // ops on D_mu
  std::vector<Nd> casorati_t_perp, casorati_k_perp;  // ops on the complement
  std::vector<std::vector<Nd>> h_pair, T_pair;       // cross-block second forms

  // duals: <A_Z X, Y> = <h(X,Y), Z>; returns op on block mu for Z = frame
  // vector z (which must lie in the complement of mu).
  Nd shape_op(int mu, int z) const;
  Nd tsharp_op(int mu, int z) const;
  Nd shape_op_perp(int mu, int z) const;   // dual of h_tilde, z in block mu
  Nd tsharp_op_perp(int mu, int z) const;  // dual of T_tilde, z in block mu
};

struct FlagWitness {
  double max_residual = 0.0;
  std::vector<double> point;
};

struct StructureFlags {
  double tol = 1e-7;
  std::vector<bool> integrable, totally_geodesic, umbilical, harmonic;
  std::vector<FlagWitness> integrable_w, totally_geodesic_w, umbilical_w, harmonic_w;
  std::vector<std::vector<bool>> mixed_totally_geodesic, mixed_integrable;
  std::vector<std::vector<FlagWitness>> mixed_tg_w, mixed_int_w;
};

namespace distributions {

AdaptedFrameField build_adapted_frame(const Chart& chart, const SplitSpec& split);

ExtrinsicData extrinsic_at(const Chart& chart, const AdaptedFrameField& frame, const double* x);

StructureFlags structure_flags(const Chart& chart, const AdaptedFrameField& frame,
                               const std::vector<std::vector<double>>& sample_points, double tol);

}  // namespace distributions

}  // namespace mixedcurv
