#pragma once

#include <string>
#include <vector>

#include "mixedcurv/errors.hpp"
#include "mixedcurv/nd.hpp"

namespace mixedcurv {

// Signature of a pseudo-orthonormal frame: eps[a] = <E_a, E_a> in {-1, +1}.
struct Signature {
  std::vector<double> eps;

  explicit Signature(int n = 0, double fill = 1.0) : eps(static_cast<std::size_t>(n), fill) {}
  explicit Signature(std::vector<double> e) : eps(std::move(e)) { validate(); }

  int n() const { return static_cast<int>(eps.size()); }
  void validate() const {
    for (double e : eps)
      if (e != 1.0 && e != -1.0) throw BadInput("signature entries must be +-1");
  }
  static Signature riemannian(int n) { return Signature(n, 1.0); }
};

// Tensor components against a named frame. Index layout: the `cov` covariant
// slots come first, then the `contra` value slots; every index runs 0..n-1.
struct TensorValue {
  int cov = 0;
  int contra = 0;
  int n = 0;
  std::string frame_tag;
  Nd comps;

  TensorValue() = default;
  TensorValue(int cov_, int contra_, int n_, std::string tag = "")
      : cov(cov_), contra(contra_), n(n_), frame_tag(std::move(tag)) {
    comps.reshape(std::vector<int>(static_cast<std::size_t>(cov + contra), n));
  }

  int rank() const { return cov + contra; }

  void require_same_shape(const TensorValue& o) const {
    if (cov != o.cov || contra != o.contra || n != o.n)
      throw ShapeError("tensor rank/dimension mismatch");
  }
  void require_same_frame(const TensorValue& o) const {
    if (frame_tag != o.frame_tag) throw FrameError("frame mismatch: '" + frame_tag + "' vs '" + o.frame_tag + "'");
  }
};

namespace core_tensor {

// Musical isomorphisms for rank-one tensors with an explicit metric g (n x n,
// row-major). Throws DegenerateMetric when g is singular.
TensorValue flat(const TensorValue& v, const std::vector<double>& g, const Signature& sig);
TensorValue sharp(const TensorValue& omega, const std::vector<double>& g, const Signature& sig);

// Orthonormal-frame variants (g = diag(eps)).
TensorValue flat(const TensorValue& v, const Signature& sig);
TensorValue sharp(const TensorValue& omega, const Signature& sig);

// Full signature-weighted contraction of two equal-rank tensors.
double inner(const TensorValue& t1, const TensorValue& t2, const Signature& sig);

// (0,2)-tensor Upsilon_{P,P'} of two (1,2)-tensors, defined against symmetric
// pairings: <Upsilon, S> = sum eps eps [S(P,P') + S(P',P)].
TensorValue upsilon(const TensorValue& p, const TensorValue& p2, const Signature& sig);

// Helpers shared across modules.
double max_abs(const TensorValue& t);
TensorValue sym2(const TensorValue& t);      // symmetrize a (0,2)
bool is_symmetric2(const std::vector<double>& g, int n, double tol);

}  // namespace core_tensor

}  // namespace mixedcurv
