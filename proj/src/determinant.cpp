#include "rescount/determinant.hpp"

#include <cfloat>
#include <cmath>

#include "rescount/lapack.hpp"

namespace rescount {

double continuation_gamma_max(const Potential& V) {
  if (const auto* e = std::get_if<ExpProfile>(&V.v)) {
    if (e->eps == 0.0) return e->c / 2.0;
  }
  return HUGE_VAL;  // compactly supported or super-exponential decay
}

namespace {

// Tail of sum_{k>N} s_k^alpha under the envelope shape s_k ~ C k^{-1/d},
// with C pinned so the envelope passes through the last computed value.
double beyond_matrix_tail(double s_last, int N, int alpha, int d) {
  if (s_last <= 0.0 || N <= 0) return 0.0;
  const double C = s_last * std::pow(static_cast<double>(N), 1.0 / d);
  const double ex = static_cast<double>(alpha) / d;
  if (ex <= 1.0) return HUGE_VAL;
  return std::pow(C, alpha) * std::pow(static_cast<double>(N), 1.0 - ex) / (ex - 1.0);
}

}  // namespace

DetSample eval_det_from_eigs(const std::vector<cplx>& eigs, const std::vector<double>& svals,
                             cplx lambda, int alpha, double tail_extrapolation) {
  if (alpha < 2) throw error("eval_det_from_eigs: alpha must be >= 2");
  DetSample out;
  out.lambda = lambda;
  out.alpha = alpha;
  double logmod = 0.0;
  cplx phase_acc = 1.0;  // running product of unit-modulus factors
  for (cplx mu : eigs) {
    const cplx f = 1.0 - std::pow(-mu, alpha);
    const double a = std::abs(f);
    if (a < 1e-14 * (1.0 + std::pow(std::abs(mu), alpha))) out.on_zero = true;
    logmod += std::log(std::max(a, DBL_MIN));
    if (a > 0.0) phase_acc *= f / a;
  }
  out.log_modulus = logmod;
  out.phase = std::arg(phase_acc);
  double tail = tail_extrapolation;
  for (size_t k = eigs.size(); k < svals.size(); ++k) tail += std::pow(svals[k], alpha);
  out.tail_estimate = tail;
  return out;
}

DetSample eval_det(const BSMatrix& M, int alpha) {
  const int d = M.potential.dim;
  if (alpha < d + 1) throw error("eval_det: alpha must be >= d+1");
  const Eigen::VectorXcd ev = eigenvalues_dense(M.entries);
  const Eigen::VectorXd sv = singular_values_dense(M.entries);
  const std::vector<cplx> eigs(ev.data(), ev.data() + ev.size());
  const std::vector<double> svals(sv.data(), sv.data() + sv.size());
  const int n = static_cast<int>(svals.size());
  const double extrap = n > 0 ? beyond_matrix_tail(svals[n - 1], n, alpha, d) : 0.0;
  DetSample out = eval_det_from_eigs(eigs, svals, M.lambda, alpha, extrap);
  out.lambda = M.lambda;
  return out;
}

std::vector<DetSample> det_on_contour(const Potential& V, std::shared_ptr<const SpaceGrid> grid,
                                      const std::vector<cplx>& contour, int alpha) {
  const double gmax = continuation_gamma_max(V);
  for (cplx lam : contour)
    if (!(lam.imag() > -gmax))
      throw error("det_on_contour: node outside the continuation region im lambda > -gamma");
  std::vector<DetSample> out;
  out.reserve(contour.size());
  const auto pre = build_static_kernel(grid);
  for (cplx lam : contour) {
    DetSample s = eval_det(assemble_bs(V, grid, pre, lam), alpha);
    s.tail_ok = s.tail_estimate < 1e-8;
    out.push_back(s);
  }
  return out;
}

double logdet_envelope_upper(cplx lambda, const PotentialNorms& norms) {
  if (lambda.imag() < 0.0) throw error("logdet_envelope_upper: requires im lambda >= 0");
  const double al = std::abs(lambda);
  if (al == 0.0) throw error("logdet_envelope_upper: lambda = 0");
  return std::pow(al, -2.0) * std::pow(norms.v0, norms.dim + 1);
}

double logdet_envelope_lower(cplx lambda, const PotentialNorms& norms, double delta, double eps) {
  if (lambda.imag() >= 0.0) throw error("logdet_envelope_lower: requires im lambda < 0");
  if (delta <= 0.0 || eps <= 0.0) throw error("logdet_envelope_lower: delta, eps must be > 0");
  const double al = std::abs(lambda);
  const double lhs = std::sqrt(1.0 + delta) * std::abs(lambda.imag()) + eps * al;
  if (lhs > norms.gamma) {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "logdet_envelope_lower: inadmissible, (1+delta)^{1/2}|im lambda| + eps|lambda| "
                  "= %.6g > gamma = %.6g",
                  lhs, norms.gamma);
    throw error(buf);
  }
  const int d = norms.dim;
  const double cd = std::pow(delta, -static_cast<double>((d - 1) * (d - 1)) / (d + 1));
  const double first = std::pow(al, -2.0) * std::pow(norms.v0, d + 1);
  const double inner = 2.0 + std::pow(al, -2.0) * std::pow(cd * norms.v_gamma, d + 1);
  return first + std::pow(eps, 1.0 - d) * std::pow(std::log(inner), d);
}

}  // namespace rescount
