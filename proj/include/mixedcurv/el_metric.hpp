#pragma once

#include "mixedcurv/functionals.hpp"

namespace mixedcurv {

// Compactly supported symmetric variation of the metric on one block:
// B(x) = bump(x) * sum seed(a,b) E_a^flat (x) E_b^flat, a,b in block mu of the
// base frame. The bump is exp(-1/(1-r^2)) over an ellipsoid inside the box.
struct VariationField {
  int mu = 0;
  std::vector<double> center, halfwidth;
  Nd seed;  // (n,n) symmetric, nonzero only on block mu

  double bump(const double* x, int n) const;
  // coordinate components B_ij(x), using the base frame field
  void coord_at(const Chart& chart, const AdaptedFrameField& frame, const double* x, Nd& out) const;
};

struct ELReport {
  std::vector<double> residual_per_block;  // max abs residual per mu
  double lambda = 0.0;
  bool pass = false;
  double tol = 0.0;
  std::vector<double> worst_point;
  int worst_mu = 0;
  double max_residual = 0.0;
};

enum class ActionSelector { Action, QSum, QBarSum, Volume };

namespace el_metric {

// delta Q_mu as a (0,2) frame-component tensor on block mu x block mu.
Nd delta_q_mu_at(const Chart& chart, const AdaptedFrameField& frame, const double* x, int mu);

// split of delta Q_mu into the own-block part and the contribution of one
// other block (delta_q_mu_at = own + sum over nu != mu of dual parts)
Nd delta_q_mu_own_at(const Chart& chart, const AdaptedFrameField& frame, const double* x, int mu);
Nd delta_q_mu_dual_at(const Chart& chart, const AdaptedFrameField& frame, const double* x, int mu,
                      int nu);

// statistical closed form of delta_g Qbar_mu (frame components, block mu).
Nd delta_qbar_mu_statistical_at(const Chart& chart, const AdaptedFrameField& frame, const double* x,
                                int mu, const ContorsionField& I);

// oracle-grade pointwise variation of sum_nu Qbar_nu for non-statistical
// flavors: central difference under a coordinate-constant block variation.
Nd delta_qbar_mu_fd_at(const Chart& chart, const AdaptedFrameField& frame, const double* x, int mu,
                       const ContorsionField& I);

// d/dt F(g + t B) |_{t=0} with one Richardson step; F chosen by selector.
// The default step balances rounding noise of the integrand against the
// Richardson-suppressed truncation error.
double fd_metric_gradient(const Chart& chart, const AdaptedFrameField& frame,
                          const QuadratureGrid& grid, const ContorsionField* I,
                          const VariationField& B, ActionSelector selector, double t0 = 1e-2);

// integral pairing of the analytic Euler-Lagrange tensor with B over the grid:
// 1/2 int < deltaQ_mu + deltaQbar_mu + (Sbar - 1/2 Div Y) g_mu, B > dvol.
double analytic_el_pairing(const Chart& chart, const AdaptedFrameField& frame,
                           const QuadratureGrid& grid, const ContorsionField* I,
                           const VariationField& B);

enum class LambdaMode { Fit, Given };

ELReport metric_el_residual(const Chart& chart, const AdaptedFrameField& frame,
                            const std::vector<std::vector<double>>& sample_points,
                            const ContorsionField* I, LambdaMode mode, double lambda_given = 0.0,
                            double tol = 1e-6);

// rho coefficients of the Einstein-form presentation (zeros when n == 2).
std::vector<double> rho_at(const Chart& chart, const AdaptedFrameField& frame, const double* x);

// block-diagonal Ricci-type tensor: -deltaQ_mu - deltaQbar_mu + rho_mu g_mu.
Nd ric_D_at(const Chart& chart, const AdaptedFrameField& frame, const double* x,
            const ContorsionField* I);

// Pointwise frame components of B at x (helper shared with tests).
Nd variation_frame_components(const Chart& chart, const AdaptedFrameField& frame,
                              const VariationField& B, const double* x);

}  // namespace el_metric

}  // namespace mixedcurv
