#include "rescount/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace rescount {

cplx resolvent_kernel(cplx lambda, const Eigen::Vector3d& x, const Eigen::Vector3d& y) {
  const double r = (x - y).norm();
  if (r == 0.0) throw error("resolvent_kernel: coincident points");
  return std::exp(iu * lambda * r) / (4.0 * pi * r);
}

namespace {

// sin(u)/u stable near 0.
cplx sinc(cplx u) {
  if (std::abs(u) < 1e-4) {
    const cplx u2 = u * u;
    return 1.0 - u2 / 6.0 * (1.0 - u2 / 20.0 * (1.0 - u2 / 42.0));
  }
  return std::sin(u) / u;
}

}  // namespace

cplx extension_kernel(cplx lambda, const Eigen::Vector3d& z) {
  return 4.0 * pi * sinc(lambda * z.norm());
}

double stone_residual(cplx lambda,
                      const std::vector<std::pair<Eigen::Vector3d, Eigen::Vector3d>>& pairs,
                      const SphereRule& rule) {
  double rmax = 0.0;
  for (const auto& [x, y] : pairs) rmax = std::max(rmax, (x - y).norm());
  const int needed = 2 * static_cast<int>(std::ceil(std::abs(lambda) * rmax)) + 10;
  if (rule.degree < needed)
    throw error("stone_residual: sphere rule degree " + std::to_string(rule.degree) +
                " below required " + std::to_string(needed));
  double worst = 0.0;
  for (const auto& [x, y] : pairs) {
    const Eigen::Vector3d z = x - y;
    const double r = z.norm();
    cplx quad = 0.0;
    for (size_t j = 0; j < rule.nodes.size(); ++j)
      quad += rule.weights[j] * std::exp(iu * lambda * z.dot(rule.nodes[j]));
    // quadrature must agree with the closed form before it certifies anything
    worst = std::max(worst, std::abs(quad - extension_kernel(lambda, z)));
    const cplx lhs = (r == 0.0) ? cplx(0.0)
                                : (std::exp(iu * lambda * r) - std::exp(-iu * lambda * r)) /
                                      (4.0 * pi * r);
    worst = std::max(worst, std::abs(lhs - a3 * lambda * quad));
  }
  return worst;
}

std::vector<double> sphere_power_singvals_prefix(const SphereOperator& op, int kmax) {
  if (kmax < 1) throw error("sphere_power_singvals: k must be >= 1");
  std::vector<double> out;
  out.reserve(kmax);
  // eigenvalues are already nonincreasing in l2 since 1+eps^2 l2(l2+1) grows
  for (int l2 = 0; l2 <= op.lmax && static_cast<int>(out.size()) < kmax; ++l2) {
    const double s = std::pow(1.0 + op.eps * op.eps * l2 * (l2 + 1.0), -op.l);
    for (int m = 0; m < 2 * l2 + 1 && static_cast<int>(out.size()) < kmax; ++m) out.push_back(s);
  }
  if (static_cast<int>(out.size()) < kmax)
    throw error("sphere_power_singvals: lmax truncation too small for requested k");
  return out;
}

double sphere_power_singvals(const SphereOperator& op, int k) {
  return sphere_power_singvals_prefix(op, k).back();
}

EnvelopeFit kernel_envelope_check(cplx lambda, const std::vector<double>& rs, bool conjugated) {
  EnvelopeFit fit;
  const double t = std::abs(lambda.imag());
  for (double r : rs) {
    EnvelopeRow row;
    row.lambda = lambda;
    row.r = r;
    if (conjugated) {
      row.value = std::abs(extension_kernel(2.0 * iu * lambda.imag(), {r, 0, 0}));
      row.bound = std::exp(2.0 * t * r) / (1.0 + 2.0 * t * r);
    } else {
      row.value = std::abs(extension_kernel(lambda, {r, 0, 0}));
      row.bound = std::exp(t * r) / (1.0 + std::abs(lambda) * r);
    }
    fit.C_fit = std::max(fit.C_fit, row.value / row.bound);
    fit.rows.push_back(row);
  }
  return fit;
}

}  // namespace rescount
