#pragma once

#include <vector>

#include "rescount/bs.hpp"
#include "rescount/common.hpp"
#include "rescount/potentials.hpp"

namespace rescount {

struct DetSample {
  cplx lambda;
  double log_modulus = 0;
  double phase = 0;  // principal, in (-pi, pi]
  int alpha = 4;
  double tail_estimate = 0;
  bool on_zero = false;   // some (-mu)^alpha == 1 within roundoff
  bool tail_ok = true;    // tail_estimate below the contour-use threshold
};

// det(I - (-M)^alpha) from the eigenvalues of M; alpha >= d+1 = 4. For even
// alpha this coincides with det(I - M^alpha), so alpha=4 is the H form.
// tail_estimate bounds |log det| truncation error: sum of s_k^alpha beyond
// the kept spectrum plus a (R|lambda| + k^{1/3})^{-alpha} extrapolation.
DetSample eval_det(const BSMatrix& M, int alpha);

// Same from a precomputed eigenvalue list plus the singular values used for
// the tail bound (svals may be empty: tail = 0, e.g. synthetic spectra).
DetSample eval_det_from_eigs(const std::vector<cplx>& eigs, const std::vector<double>& svals,
                             cplx lambda, int alpha, double tail_extrapolation = 0);

std::vector<DetSample> det_on_contour(const Potential& V, std::shared_ptr<const SpaceGrid> grid,
                                      const std::vector<cplx>& contour, int alpha);

// Largest gamma with e^{2 gamma |x|} V integrable; the determinant continues
// meromorphically to im lambda > -gamma_max. Infinite for compact support.
double continuation_gamma_max(const Potential& V);

// |lambda|^{-2} v0^{d+1} (constant-free), im lambda >= 0.
double logdet_envelope_upper(cplx lambda, const PotentialNorms& norms);

// |lambda|^{-2} v0^{d+1} + eps^{1-d} [ln(2+|lambda|^{-2}(c_delta v_gamma)^{d+1})]^d,
// im lambda < 0; throws when (1+delta)^{1/2}|im lambda| + eps|lambda| > gamma.
double logdet_envelope_lower(cplx lambda, const PotentialNorms& norms, double delta, double eps);

}  // namespace rescount
