#pragma once

#include <cmath>

#include "mixedcurv/checks.hpp"
#include "mixedcurv/el_metric.hpp"

namespace mixedcurv {

// Three Reeb fields spanning the one-dimensional blocks of a (1,1,1,n4)
// split; block 3 (0-based) is their orthogonal complement.
struct SasakiStructure {
  std::vector<VectorFieldFn> reeb;  // 3 fields, coordinate components
  int n4 = 0;
};

struct PhiChiTensors {
  std::vector<Nd> phi, phi_top;         // per block: (n,n,n) frame values / (n,n) lowered
  std::vector<Nd> phi_tilde, phi_tilde_perp;
  std::vector<Nd> chi, chi_tilde;       // (n,n) lowered symmetric
};

enum class TwistedCase { General, MixedDims, AllOneDim };

namespace special_geometries {

// residual vector (frame components) of the criticality condition for
// connections parameterized by a single vector field
std::vector<double> semi_symmetric_critical_residual(const Chart& chart,
                                                     const AdaptedFrameField& frame, const double* x,
                                                     const VectorFieldFn& u);

ELReport semi_symmetric_metric_el_residual(const Chart& chart, const AdaptedFrameField& frame,
                                           const std::vector<std::vector<double>>& sample_points,
                                           const VectorFieldFn& u, el_metric::LambdaMode mode,
                                           double lambda_given = 0.0, double tol = 1e-6);

ELReport twisted_el_residual(const Chart& chart, const AdaptedFrameField& frame,
                             const std::vector<std::vector<double>>& sample_points,
                             const ContorsionField* I, TwistedCase which, double tol = 1e-6,
                             double flag_tol = 1e-6);

ELReport stat_restricted_metric_el_residual(const Chart& chart, const AdaptedFrameField& frame,
                                            const std::vector<std::vector<double>>& sample_points,
                                            const ContorsionField& I, double tol = 1e-6);

// numeric validation of the Reeb-field structure relations
CheckReport sasaki_structure_check(const Chart& chart, const AdaptedFrameField& frame,
                                   const SasakiStructure& s,
                                   const std::vector<std::vector<double>>& sample_points,
                                   double tol = 1e-6);

PhiChiTensors sasaki_tensors_at(const Chart& chart, const AdaptedFrameField& frame,
                                const SasakiStructure& s, const double* x, const ContorsionField* I);

CheckReport sasaki_identities_check(const Chart& chart, const AdaptedFrameField& frame,
                                    const SasakiStructure& s,
                                    const std::vector<std::vector<double>>& sample_points,
                                    double tol = 1e-5);

struct SasakiELResult {
  ELReport report;
  double traced_d4_constant = 0.0;   // constant side of the traced D4 equation
  double traced_abc_constant = 0.0;  // constant side of the averaged D1..D3 equation
  double mismatch = 0.0;
};

SasakiELResult sasaki_el_residual(const Chart& chart, const AdaptedFrameField& frame,
                                  const SasakiStructure& s,
                                  const std::vector<std::vector<double>>& sample_points,
                                  const ContorsionField* I, double tol = 1e-5);

// weight that makes the one-dimensional and complement equations compatible
double weighted_action_c(int n4);

// recomputes the multiplier of the weighted action two ways from numeric
// variation tensors on a Sasaki model; returns (lambda_d4, lambda_abc)
std::pair<double, double> weighted_action_lambdas(const Chart& chart, const AdaptedFrameField& frame,
                                                  const double* x, double c);

}  // namespace special_geometries

}  // namespace mixedcurv
