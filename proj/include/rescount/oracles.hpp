#pragma once

#include <vector>

#include "rescount/common.hpp"
#include "rescount/counting.hpp"

namespace rescount {

struct RadialMode {
  int ell = 0;
  cplx V0;
  double R = 1;
  std::vector<cplx> roots;
  std::vector<double> residuals;  // secular residual per root
};

// Entire secular function for the ball well V0*1_{B(0,R)}, angular momentum
// ell: S_ell(lambda) = lambda^{ell+1} F_ell(lambda) / kappa^ell with
// F_ell = kappa j_ell'(kappa R) h_ell(lambda R) - lambda j_ell(kappa R) h_ell'(lambda R),
// kappa = sqrt(lambda^2 - V0). Single-valued: even in the kappa branch, and
// the lambda^{ell+1} factor cancels the h_ell pole at 0. Zeros = resonances.
// For ell = 0 the zero condition reduces to kappa cot(kappa R) = i lambda
// (log-derivative match of sin(kappa r) to the outgoing wave e^{i lambda r}).
// The returned value is S_ell times a zero-free entire factor (an exponential
// and a positive constant), so zeros, multiplicities, and closed-contour
// windings are those of S_ell itself.
cplx secular_3d(int ell, cplx V0, double R, cplx lambda);

// Entire secular function for the 1D well V0*1_{[-a,a]}:
// W(lambda) = (kappa sin(kappa a) + i lambda cos(kappa a))
//           * (cos(kappa a) - i lambda sin(kappa a)/kappa), even in kappa.
// Even factor <-> even-parity resonances, odd factor <-> odd-parity.
cplx secular_1d(cplx V0, double a, cplx lambda);

// Smallest ell such that no secular zero exists at any |z| <= zmax for
// angular momenta >= ell (continued-fraction log-derivative separation).
int barrier_ell_max(double zmax);

// All roots of secular_3d in the region, per ell, with 2l+1 multiplicity
// implied. ell_max < 0 selects the certified barrier automatically.
std::vector<RadialMode> oracle_3d_radial(cplx V0, double R, int ell_max, const Rect& region);

// Roots of secular_1d in the region.
std::vector<cplx> oracle_1d_squarewell(cplx V0, double a, const Rect& region);

// Total determinant-side count implied by radial modes: sum (2l+1) * #roots
// restricted to |lambda| <= r.
int radial_total(const std::vector<RadialMode>& modes, double r);

struct CompareResult {
  bool match = false;
  int count_a = 0, count_b = 0;
  std::string diagnostic;  // nearest-pairing dump on mismatch
};
CompareResult compare_counts(int determinant_count, const std::vector<RadialMode>& modes, double r);
CompareResult compare_counts(const CountReport& report, const std::vector<RadialMode>& modes);

}  // namespace rescount
