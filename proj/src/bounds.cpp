#include "rescount/bounds.hpp"

#include <cmath>

namespace rescount {

namespace {

double angled(double x) { return 2.0 + std::abs(x); }  // <x> = 2+|x|

std::string ineq(const char* lhs, double lv, const char* rhs, double rv) {
  return std::string(lhs) + " = " + std::to_string(lv) + " !<= " + rhs + " = " +
         std::to_string(rv);
}

}  // namespace

double c_delta(double delta, int d) {
  if (delta <= 0.0) throw error("c_delta: delta must be > 0");
  const double e = static_cast<double>((d - 1) * (d - 1)) / (d + 1);
  return std::pow(delta, -e);
}

RhsResult thm_Lp_rhs(const BoundParams& p, const PotentialNorms& norms) {
  RhsResult out;
  const int d = p.d;
  const double v0 = norms.v0, vg = norms.v_gamma;
  const double cd = c_delta(p.delta, d);
  out.rhs = std::pow(p.r, -2.0) * std::pow(v0, d + 1) + std::pow(p.A, -2.0) +
            std::pow(p.eps, 1 - d) *
                std::pow(std::log(2.0 + std::pow(p.r, -2.0) * std::pow(cd * vg, d + 1)), d);
  const double lhs = std::sqrt(1.0 + p.delta) * p.r +
                     p.eps * std::sqrt(p.A * std::pow(v0, (d + 1) / 2.0) * p.r + p.r * p.r);
  if (lhs > p.gamma) {
    out.admissible = false;
    out.violated = ineq("(1+delta)^{1/2} r + eps (A v0^{(d+1)/2} r + r^2)^{1/2}", lhs, "gamma",
                        p.gamma);
  }
  return out;
}

HalfplaneRhs thm_halfplane_rhs(const BoundParams& p, const PotentialNorms& norms) {
  const double cap = p.gamma / std::sqrt(1.0 + p.delta);
  if (p.eps <= 0.0 || p.eps > cap)
    throw error("thm_halfplane_rhs: eps must lie in (0, gamma/sqrt(1+delta)]");
  HalfplaneRhs out;
  const int d = p.d;
  out.rhs = std::pow(c_delta(p.delta, d) * norms.v_gamma, d + 1) / (p.gamma * p.eps);
  out.rhs_endpoint = std::pow(norms.v0, d + 1) / (p.gamma * p.eps);
  out.boundary_im = -cap + p.eps;
  return out;
}

EigenvalueRhs thm_eigenvalue_rhs(double gamma, const PotentialNorms& norms, int d) {
  if (gamma <= 0.0) throw error("thm_eigenvalue_rhs: gamma must be > 0");
  EigenvalueRhs out;
  const double v0 = norms.v0, vg = norms.v_gamma;
  out.rhs = std::pow(gamma, -2.0) * std::pow(v0, d + 1) +
            std::pow(gamma, 1 - d) * std::pow(v0, (d * d - 1) / 2.0) *
                std::pow(std::log(2.0 + std::pow(gamma, -2.0) * std::pow(vg, d + 1)), d);
  out.smallness = gamma <= std::pow(v0, (d + 1) / 2.0) / 10.0;
  return out;
}

namespace {

ThreeTerms three_terms(const BoundParams& p, double amplitude, double weighted_amplitude,
                       double R, double hat_power) {
  ThreeTerms out;
  const int d = p.d;
  const double rR = p.r * R;
  out.I = std::pow(std::pow(angled(rR), hat_power) * std::log(angled(rR)) * R / p.r * amplitude,
                   (d - 1) / p.nu) +
          std::pow(rR, d) * std::pow(std::sqrt(amplitude) / p.r, d / p.theta);
  out.II = std::pow(rR, d) * std::pow(p.A, -static_cast<double>(d) / p.theta);
  out.III = std::pow(p.eps, 1 - d) *
            std::pow(std::log(2.0 + std::pow(std::pow(p.delta, 1 - d) * R / p.r *
                                                 weighted_amplitude,
                                             p.alpha)),
                     d);
  out.sum = out.I + out.II + out.III;
  const double lhs = std::sqrt(1.0 + p.delta) * p.r +
                     p.eps * std::sqrt(p.A * std::sqrt(amplitude) * p.r + p.r * p.r);
  if (lhs > p.gamma) {
    out.admissible = false;
    out.violated = ineq("(1+delta)^{1/2} r + eps (A sup^{1/2} r + r^2)^{1/2}", lhs, "gamma",
                        p.gamma);
  }
  return out;
}

void check_alpha(const BoundParams& p, ThreeTerms& out) {
  const double need = std::max((p.d - 1) / p.nu, p.d / (2.0 * p.theta));
  if (!(p.alpha > need)) {
    out.admissible = false;
    if (!out.violated.empty()) out.violated += "; ";
    out.violated += ineq("max((d-1)/nu, d/(2 theta))", need, "< alpha", p.alpha);
  }
}

}  // namespace

ThreeTerms thm_compact_terms(const BoundParams& p, double sup_norm, double R) {
  ThreeTerms out =
      three_terms(p, sup_norm, std::exp(2.0 * p.gamma * R) * sup_norm, R, p.nu);
  check_alpha(p, out);
  return out;
}

ThreeTerms thm_pointwise_terms(const BoundParams& p, const PotentialNorms& norms, double rho) {
  ThreeTerms out = three_terms(p, norms.v_rhoR, norms.v_rhoRgamma, p.R, p.nu + p.kappa);
  check_alpha(p, out);
  if (!(p.theta >= 0.5 && p.theta <= 1.0)) {
    out.admissible = false;
    if (!out.violated.empty()) out.violated += "; ";
    out.violated += "theta not in [1/2, 1]: theta = " + std::to_string(p.theta);
  }
  const double rho_need = std::max(1.0 + p.nu + p.kappa, 2.0 * p.theta);
  if (!(rho > rho_need)) {
    out.admissible = false;
    if (!out.violated.empty()) out.violated += "; ";
    out.violated += "rho > max(1+nu+kappa, 2 theta): " + ineq("rho", rho, "needs >", rho_need);
  }
  return out;
}

std::map<std::string, bool> verdict(const std::map<std::string, double>& bound_values,
                                    double count, const Calibration& cal) {
  std::map<std::string, bool> out;
  for (const auto& [id, rhs] : bound_values) {
    auto it = cal.C.find(id);
    const double C = (it == cal.C.end()) ? 1.0 : it->second;
    out[id] = count <= C * rhs * (1.0 + 1e-12);
  }
  return out;
}

}  // namespace rescount
