#pragma once

#include <map>
#include <optional>
#include <string>

#include "rescount/common.hpp"
#include "rescount/potentials.hpp"

namespace rescount {

struct BoundParams {
  double r = 1;
  double gamma = 1;
  double delta = 1;  // in (0,1]
  double eps = 1;    // in (0,1]
  double theta = 1;  // in (0,1]
  double nu = 1;
  double kappa = 1;
  double alpha = 5;  // > max((d-1)/nu, d/(2 theta))
  double A = 1;
  double R = 1;
  int d = 3;
};

// delta^{-(d-1)^2/(d+1)}
double c_delta(double delta, int d);

struct RhsResult {
  double rhs = 0;
  bool admissible = true;
  std::string violated;  // inequality text when not admissible
};

// r^{-2} v0^{d+1} + A^{-2} + eps^{1-d} [ln(2 + r^{-2} (c_delta v_gamma)^{d+1})]^d;
// admissible iff (1+delta)^{1/2} r + eps (A v0^{(d+1)/2} r + r^2)^{1/2} <= gamma.
RhsResult thm_Lp_rhs(const BoundParams& p, const PotentialNorms& norms);

struct HalfplaneRhs {
  double rhs = 0;           // (gamma eps)^{-1} (c_delta v_gamma)^{d+1}
  double rhs_endpoint = 0;  // (gamma eps)^{-1} v0^{d+1}
  double boundary_im = 0;   // counting region: im lambda >= -gamma/sqrt(1+delta)+eps
};
// Throws when eps is outside (0, gamma/sqrt(1+delta)].
HalfplaneRhs thm_halfplane_rhs(const BoundParams& p, const PotentialNorms& norms);

struct EigenvalueRhs {
  double rhs = 0;
  bool smallness = false;  // gamma <= v0^{(d+1)/2}/10
};
// gamma^{-2} v0^{d+1} + gamma^{1-d} v0^{(d^2-1)/2} [ln(2+gamma^{-2} v_gamma^{d+1})]^d
EigenvalueRhs thm_eigenvalue_rhs(double gamma, const PotentialNorms& norms, int d = 3);

struct ThreeTerms {
  double I = 0, II = 0, III = 0;
  double sum = 0;
  bool admissible = true;
  std::string violated;
};

// I   = (<rR>^nu ln<rR> R r^{-1} sup)^{(d-1)/nu} + (Rr)^d (r^{-1} sup^{1/2})^{d/theta}
// II  = (Rr)^d A^{-d/theta}
// III = eps^{1-d} [ln(2 + (delta^{1-d} R r^{-1} e^{2 gamma R} sup)^alpha)]^d
// with <x> = 2+|x|; admissibility (1+delta)^{1/2} r + eps (A sup^{1/2} r + r^2)^{1/2} <= gamma.
ThreeTerms thm_compact_terms(const BoundParams& p, double sup_norm, double R);

// Same shape with v_{rho,R} in place of sup and the <rR> power nu+kappa; needs
// theta in [1/2,1], rho > max(1+nu+kappa, 2 theta), alpha > max((d-1)/nu, d/(2 theta)).
ThreeTerms thm_pointwise_terms(const BoundParams& p, const PotentialNorms& norms, double rho);

struct Calibration {
  std::map<std::string, double> C;  // theorem id -> calibrated constant
};

// pass iff count <= C_cal * rhs per theorem present in bound_values.
std::map<std::string, bool> verdict(const std::map<std::string, double>& bound_values,
                                    double count, const Calibration& cal);

}  // namespace rescount
