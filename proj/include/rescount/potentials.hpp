#pragma once

#include <Eigen/Core>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "rescount/common.hpp"
#include "rescount/quadrature.hpp"

namespace rescount {

// V = h on the closed ball |x| <= R, 0 outside.
struct BallIndicator {
  double R = 1.0;
  cplx h{1.0, 0.0};
};

// V = h on the tube {|x1| <= R, |x'| <= R^{1/2}}; the transverse radius is
// R^{1/2} by construction.
struct TubeIndicator {
  double R = 1.0;
  cplx h{1.0, 0.0};
};

// Piecewise-constant radial shells: values[i] on radii[i] <= |x| < radii[i+1];
// zero inside radii.front() and outside radii.back().
// radii strictly increasing, radii.front() >= 0, values.size()+1 == radii.size().
struct RadialTable {
  std::vector<double> radii;
  std::vector<cplx> values;
};

struct SparseBump {
  Eigen::Vector3d center{0, 0, 0};
  double radius = 1.0;
  cplx h{1.0, 0.0};
};

// Sum of indicator bumps with pairwise disjoint closures.
struct SparseSum {
  std::vector<SparseBump> bumps;
};

// V(x) = exp(-c |x|^{1+eps}).
struct ExpProfile {
  double c = 1.0;
  double eps = 1.0;
};

// Values sampled on a quadrature grid; norms are weighted sums, evaluation is
// nearest-node lookup.
struct GridSampled {
  std::shared_ptr<const SpaceGrid> grid;
  std::vector<cplx> values;
};

struct Potential {
  int dim = 3;  // odd; numerics support 1 and 3
  std::variant<BallIndicator, TubeIndicator, RadialTable, SparseSum, ExpProfile, GridSampled> v;
};

// Norms and weights consumed by the bound evaluators.
struct PotentialNorms {
  double v0 = 0;           // ||V||_{(d+1)/2}
  double v_gamma = 0;      // ||e^{2 gamma |.|} V||_{(d+1)/2, 1}
  double v_rhoR = 0;       // sup (1+|x|/R)^rho |V|
  double v_rhoRgamma = 0;  // sup e^{2 gamma |x|} (1+|x|/R)^rho |V|
  double sup_norm = 0;
  double gamma = 0, rho = 0, R = 1;
  int dim = 3;
};

// Structural invariants (shell ordering, disjointness, dimension support).
// Throws rescount::error on violation.
void validate(const Potential& V);

cplx eval_potential(const Potential& V, const Eigen::Vector3d& x);

// L^p norm; closed-form for indicator variants, adaptive quadrature for
// ExpProfile (relative error <= 1e-8). Throws on divergence (c <= 0).
double lp_norm(const Potential& V, double p);

// Lorentz quasinorm of e^{2 gamma |.|} V: layer-cake integration of the
// distribution function on log-spaced panels with Richardson extrapolation,
// split at the distribution function's breakpoints. Relative error <= 1e-6.
double lorentz_quasinorm(const Potential& V, double p, double q, double gamma);

// Weighted sup norms (1+|x|/R)^rho e^{2 gamma |x|} |V(x)|; closed form on
// indicator/radial variants, golden-section on radial profiles otherwise.
// Throws when the supremum is infinite.
PotentialNorms weighted_sup_norms(const Potential& V, double rho, double R, double gamma);

// All norms the theorems consume, in one table.
PotentialNorms compute_norms(const Potential& V, double gamma, double rho, double R);

// Structured-text serialization; to_text . from_text is the identity bit-for-bit.
std::string to_text(const Potential& V);
Potential potential_from_text(const std::string& text);

// Dilation V_s(x) = s^2 V(s x) realized on the same variant family.
Potential dilate(const Potential& V, double s);

}  // namespace rescount
