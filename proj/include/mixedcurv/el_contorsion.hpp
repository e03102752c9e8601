#pragma once

#include "mixedcurv/checks.hpp"
#include "mixedcurv/functionals.hpp"

namespace mixedcurv {

// Residuals of the five linear equations characterizing critical contorsion
// tensors, indexed exactly as the families they come from: r1[mu](a,b,c) over
// one block; r2/r3/r4[mu][rho](a,b,i) over a block and one complement block;
// r5[mu][rho][xi](a,j,l) over three distinct blocks (k >= 3 only).
struct ContorsionELResiduals {
  int k = 0;
  std::vector<Nd> r1;
  std::vector<std::vector<Nd>> r2, r3, r4;
  std::vector<std::vector<std::vector<Nd>>> r5;
  double max1 = 0.0, max2 = 0.0, max3 = 0.0, max4 = 0.0, max5 = 0.0;
  double max_all() const { return std::max({max1, max2, max3, max4, max5}); }
};

struct KernelResult {
  int dimension = 0;  // -1 when the system is infeasible
  std::vector<std::vector<double>> basis;      // null-space directions (component vectors)
  std::vector<double> particular;              // least-squares solution
  double infeasibility = 0.0;                  // residual norm of the particular solution
  int unknowns = 0;
};

namespace el_contorsion {

ContorsionELResiduals contorsion_el_residuals_at(const Chart& chart, const AdaptedFrameField& frame,
                                                 const double* x, const ContorsionField& I);

CheckReport corI_check(const Chart& chart, const AdaptedFrameField& frame,
                       const std::vector<std::vector<double>>& sample_points,
                       const ContorsionField& I, double tol);

struct StatELResiduals {
  double trace_proj = 0.0;   // P_mu tr_bot I = 0
  double in_block = 0.0;     // P_perp(2 I_X U + <X,U> tr_bot I) = 0
  double cross_block = 0.0;  // three-distinct-block components
  double max_all() const { return std::max({trace_proj, in_block, cross_block}); }
};

StatELResiduals stat_el_residuals_at(const Chart& chart, const AdaptedFrameField& frame,
                                     const double* x, const ContorsionField& I);

// Pointwise solution space of the critical-contorsion system for the given
// flavor (MetricCompatible or Statistical); stacking several points yields the
// uniform kernel.
KernelResult critical_contorsion_kernel(const Chart& chart, const AdaptedFrameField& frame,
                                        const std::vector<std::vector<double>>& points,
                                        ContorsionFlavor flavor, double rank_tol = 1e-9);

}  // namespace el_contorsion

}  // namespace mixedcurv
