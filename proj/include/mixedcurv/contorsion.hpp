#pragma once

#include <functional>
#include <vector>

#include "mixedcurv/distributions.hpp"

namespace mixedcurv {

enum class ContorsionFlavor { Generic, Statistical, MetricCompatible, SemiSymmetric, SkewTorsion };

// Difference tensor between a linear connection and the Levi-Civita one.
// Components live in the adapted frame: value(a,b,c) is frame component c of
// I_{E_a} E_b. Specialized flavors are checked at construction sample points.
struct ContorsionField {
  ContorsionFlavor flavor = ContorsionFlavor::Generic;
  std::function<void(const double*, const FramePoint&, Nd&)> value_fn;
  VectorFieldFn u;  // SemiSymmetric only

  Nd at(const double* x, const FramePoint& fr) const {
    Nd out({fr.n, fr.n, fr.n});
    value_fn(x, fr, out);
    return out;
  }
};

// All four conjugate tensors at a point, frame components.
struct ContorsionConjugates {
  Nd star, wedge, star_wedge, theta;
};

namespace contorsion {

// lowered components L(a,b,c) = <I_{E_a} E_b, E_c>
Nd lowered(const Nd& icomps, const FramePoint& fr);
Nd raise_last(const Nd& lcomps, const FramePoint& fr);

ContorsionConjugates conjugates_at(const ContorsionField& I, const Chart& chart,
                                   const AdaptedFrameField& frame, const double* x);

// (top, bottom) partial traces of I for block mu, as frame-component vectors.
std::pair<std::vector<double>, std::vector<double>> partial_traces_at(const ContorsionField& I,
                                                                      const Chart& chart,
                                                                      const AdaptedFrameField& frame,
                                                                      const double* x, int mu);

// trace vectors from precomputed components
std::vector<double> trace_top(const Nd& icomps, const FramePoint& fr, int mu);
std::vector<double> trace_bottom(const Nd& icomps, const FramePoint& fr, int mu);

ContorsionField make_semi_symmetric(VectorFieldFn u_field);
// c_fn fills fully symmetric lowered components C(a,b,c) in the adapted frame
ContorsionField make_statistical(std::function<void(const double*, const FramePoint&, Nd&)> c_fn);
// t3_fn fills fully antisymmetric lowered torsion components
ContorsionField make_skew(std::function<void(const double*, const FramePoint&, Nd&)> t3_fn);
ContorsionField make_zero();
ContorsionField make_generic(std::function<void(const double*, const FramePoint&, Nd&)> fn);

// Throws FlavorViolation when the flavor invariant fails at any sample point.
void validate_flavor(const ContorsionField& I, const Chart& chart, const AdaptedFrameField& frame,
                     const std::vector<std::vector<double>>& sample_points, double tol = 1e-10);

// coordinate components I^l_{ij} of the zero-extended tensor at a point
Nd coord_components(const Nd& icomps, const FramePoint& fr);

}  // namespace contorsion

}  // namespace mixedcurv
