#pragma once

#include <vector>

#include "rescount/common.hpp"
#include "rescount/quadrature.hpp"

namespace rescount {

// Stone constant for d=3: difference of outgoing/incoming kernels equals
// a3 * lambda * (sphere integral of the plane-wave factor).
inline constexpr cplx a3{0.0, 1.0 / (8.0 * pi * pi)};

struct SphereOperator {
  double eps = 1.0;  // in (0,1]
  int l = 1;         // power of the resolvent-type factor
  int lmax = 512;    // harmonic truncation degree
};

struct EnvelopeRow {
  cplx lambda;
  double r = 0;      // |x-y| (or |x| for the conjugated variant)
  double value = 0;  // |kernel|
  double bound = 0;  // envelope without the constant
};

struct EnvelopeFit {
  double C_fit = 0;  // smallest C with value <= C * bound on the sample
  std::vector<EnvelopeRow> rows;
};

// e^{i lambda |x-y|} / (4 pi |x-y|); entire in lambda. Throws on x == y.
cplx resolvent_kernel(cplx lambda, const Eigen::Vector3d& x, const Eigen::Vector3d& y);

// integral over S^2 of e^{i lambda z.xi} dS(xi) = 4 pi sin(lambda|z|)/(lambda|z|),
// 4 pi at the removable singularity.
cplx extension_kernel(cplx lambda, const Eigen::Vector3d& z);

// Max over pairs of |[e^{i l r}-e^{-i l r}]/(4 pi r) - a3*lambda*quadrature|,
// also cross-checking the quadrature against the closed form. Throws when the
// rule degree is below 2*ceil(|lambda|*max r)+10.
double stone_residual(cplx lambda, const std::vector<std::pair<Eigen::Vector3d, Eigen::Vector3d>>& pairs,
                      const SphereRule& rule);

// k-th singular value (1-based) of (I - eps^2 Laplace_S2)^{-l}: the values
// (1+eps^2 l2(l2+1))^{-l} arranged nonincreasing with multiplicity 2*l2+1.
double sphere_power_singvals(const SphereOperator& op, int k);

// First kmax values of the same arrangement.
std::vector<double> sphere_power_singvals_prefix(const SphereOperator& op, int kmax);

// Envelope |K| <= C e^{|im lambda| r} (1+|lambda| r)^{-1} on the extension
// kernel sample; conjugated=true instead checks the coincident-point kernel
// of the conjugated product, extension_kernel(2i im lambda, x) (sinh form),
// against C e^{2|im lambda||x|} (1+2|im lambda||x|)^{-1}.
EnvelopeFit kernel_envelope_check(cplx lambda, const std::vector<double>& rs, bool conjugated);

}  // namespace rescount
