#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rescount/common.hpp"
#include "rescount/determinant.hpp"

namespace rescount {

struct ContourSpec {
  cplx center{0, 0};
  double radius = 1;
  int nodes = 128;  // >= 64
  int adaptive_depth = 12;
};

struct ShiftedDisk {
  cplx lambda0;  // on the positive imaginary axis, i*(A/2)*v0^{(d+1)/2}
  double r = 1;
  double A = 1;
};

struct Zero {
  cplx location;
  int multiplicity = 1;
};

struct CountReport {
  double r = 0;
  int n = 0;     // resonance count within radius r
  double N = 0;  // regularized count: exact over zeros when listed, else the
                 // circle-mean of ln|f/f(0)| over the counting contour
  std::optional<int> n_plus;  // zeros with im lambda >= 0 (needs a zero list)
  std::vector<Zero> zeros;
  bool zeros_from_oracle = false;  // zero list attached from the radial oracle,
                                   // not located from the determinant
  std::optional<int> oracle_n;
  std::optional<int> raw_winding;  // winding of det(I - M^4), all families;
                                   // computed when CountConfig::families is set
  std::map<std::string, int> family_counts;  // per unit-ray family of the
                                             // phase-free kernel matrix (ditto)
  std::map<std::string, double> bound_values;
  std::map<std::string, bool> verdicts;
};

struct Rect {
  double re_lo = 0, re_hi = 0, im_lo = 0, im_hi = 0;
};

// Phase-summed winding of a precomputed closed loop (first lambda == last).
// Throws if a consecutive phase jump exceeds pi/2 (caller must refine) or if
// any sample has |f| below 10x its tail estimate.
int winding_count(const std::vector<DetSample>& loop);

// Adaptive version: evaluates fn on the contour, bisecting segments until all
// phase jumps are below pi/2 or adaptive_depth is exhausted.
int winding_count_adaptive(const std::function<DetSample(cplx)>& fn, const ContourSpec& spec);

// Quadtree subdivision + Newton polish on log fn. fn must be analytic and
// zero-free on box boundaries encountered (perturbed internally if suspect).
// budget caps the number of fn evaluations; cheap scalar functions can afford
// far more than the default, which is sized for matrix-valued determinants.
// min_spacing is the coarsest edge sampling step: it must stay below
// (3 pi/2) / (max smooth phase rate of fn), or a full turn of phase inside
// one segment aliases to a small jump and zeros are silently dropped.
std::vector<Zero> locate_zeros(const std::function<DetSample(cplx)>& fn, const Rect& region,
                               double diam_tol = 1e-6, long budget = 400000,
                               double min_spacing = 0.1);

// Same machinery on det(I-(-BS)^alpha) for a potential on a grid.
std::vector<Zero> locate_zeros(const Potential& V, std::shared_ptr<const SpaceGrid> grid,
                               const Rect& region, int alpha, double diam_tol = 1e-6);

// sum over |z_j| <= r of mult * ln(r/|z_j|); zeros at the origin rejected.
double regularized_count(const std::vector<Zero>& zeros, double r);

// |circle mean of ln|f| - sum ln(r/|z_j|)| with a 4096-node trapezoid;
// requires f(0)=1 and f zero-free on |lambda|=r.
double jensen_residual(const std::function<cplx(cplx)>& f, const std::vector<Zero>& zeros,
                       double r);

// (min_im, max_abs_lower, min_abs_on_boundary) = (-r, sqrt(2|l0|r+r^2), r).
struct DiskGeometry {
  double min_im, max_abs_lower, min_abs_on_boundary;
};
DiskGeometry shifted_disk_geometry(const ShiftedDisk& disk);

// lambda0 = i (A/2) v0^2 (d = 3).
ShiftedDisk make_shifted_disk(double A, double v0, double r);

// Calibrated default A = max(A0_cal, r * v0^{-(d+1)/2}).
double default_A(double r, double v0);
double a0_calibrated();

struct CountConfig {
  int alpha = 4;
  int target_n = 2000;          // grid size for the kernel matrices
  int compress_rank = 256;      // randomized eigensolver rank (0 = full)
  bool locate = false;          // also locate individual zeros (expensive)
  bool attach_oracle = false;   // cross-fill zeros/oracle_n from the radial oracle
  bool families = false;        // also certify every family winding and the raw
                                // all-family winding (more contour refinement)
  uint64_t seed = 20260815;
};

// Resonance counting over |lambda| = r. For potentials whose phase is constant
// on their support, the winding is computed per unit-ray family of the
// phase-free kernel matrix (half-contour product phases, conjugation
// symmetry); n is the family matching the potential's phase. Otherwise n is
// the raw winding of det(I-(-BS)^alpha).
CountReport count_in_disk(const Potential& V, double r, const CountConfig& config);

// Same on a caller-supplied grid (cell-average assembly, no ball correction).
CountReport count_in_disk(const Potential& V, std::shared_ptr<const SpaceGrid> grid, double r,
                          const CountConfig& config);

}  // namespace rescount
