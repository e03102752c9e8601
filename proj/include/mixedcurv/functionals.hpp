#pragma once

#include <optional>

#include "mixedcurv/contorsion.hpp"

namespace mixedcurv {

// Product quadrature over the chart box: trapezoid on periodic axes, composite
// Simpson (odd node count) otherwise; the volume weight sqrt|det g| is applied
// by the integrators.
struct QuadratureGrid {
  std::vector<int> nodes_per_axis;

  static QuadratureGrid standard(const Chart& chart, int periodic_nodes = 32, int open_nodes = 33);
};

namespace functionals {

// Curvature of nabla + I in coordinates: at(i,j,k,l) = Rbar^l_ijk.
Nd curvature_with_contorsion_at(const Chart& chart, const AdaptedFrameField& frame, const double* x,
                                const ContorsionField* I);

// Frame components F(a,b,c,d) = <Rbar_{E_a,E_b} E_c, E_d>.
Nd curvature_frame_components(const Nd& r_coord, const FramePoint& fr);

double mixed_scalar_at(const Chart& chart, const AdaptedFrameField& frame, const double* x,
                       const ContorsionField* I);

double pair_mixed_scalar_at(const Chart& chart, const AdaptedFrameField& frame, const double* x,
                            int mu, const ContorsionField* I);

double q_term_at(const Chart& chart, const AdaptedFrameField& frame, const double* x, int mu);
// requires extrinsic data already computed (cheaper in loops)
double q_term(const ExtrinsicData& ex, int mu);

double qbar_term_at(const Chart& chart, const AdaptedFrameField& frame, const double* x, int mu,
                    const ContorsionField& I);
double qbar_term(const ExtrinsicData& ex, const Nd& icomps, int mu);

// frame components of Y = sum_mu (1/2 P_mu tr_bot(I-I*) + 1/2 P_mu_perp tr_top(I-I*) + H_mu + Ht_mu)
std::vector<double> y_field_at(const Chart& chart, const AdaptedFrameField& frame, const double* x,
                               const ContorsionField* I);

double divergence_identity_residual(const Chart& chart, const AdaptedFrameField& frame,
                                    const double* x, const ContorsionField* I);

double action_integral(const Chart& chart, const AdaptedFrameField& frame, const QuadratureGrid& grid,
                       const ContorsionField* I);

// generic quadrature of a pointwise integrand times sqrt|det g|
double integrate(const Chart& chart, const QuadratureGrid& grid,
                 const std::function<double(const double*)>& f);

}  // namespace functionals

}  // namespace mixedcurv
