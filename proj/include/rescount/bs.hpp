#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "rescount/common.hpp"
#include "rescount/potentials.hpp"
#include "rescount/quadrature.hpp"

namespace rescount {

enum class AssemblyMode {
  CellAverage,  // diagonal = cell-averaged static kernel 3/(8 pi h_j)
  Corrected,    // + exact ring-1 static cell integrals, self-cell moment
                // series for the oscillatory part, and a defect correction
                // that restores exactness on smooth integrands
};

struct BSMatrix {
  cplx lambda;
  std::shared_ptr<const SpaceGrid> grid;
  Potential potential;
  AssemblyMode mode = AssemblyMode::CellAverage;
  Eigen::MatrixXcd entries;

  int size() const { return static_cast<int>(entries.rows()); }
};

struct SingularSpectrum {
  std::vector<double> values;  // nonincreasing
  cplx lambda;
};

struct DecayFit {
  double slope = 0;      // exponent (power model) or rate (stretched model)
  double prefactor = 0;  // log-space intercept, exponentiated
  double r2 = 0;
  int k_lo = 0, k_hi = 0;  // fit window
};

enum class DecayModel { Power, StretchedExp };

// Entry (j,k) = sqrt(w_j w_k) |V(x_j)|^{1/2} G_lambda(x_j,x_k) V(x_k)^{1/2},
// V^{1/2} on the principal branch. The Corrected mode needs cell geometry and
// therefore a BallGrid (see assemble_bs_corrected).
BSMatrix assemble_bs(const Potential& V, std::shared_ptr<const SpaceGrid> grid, cplx lambda);

// Cell-exact corrections for a ball product grid. The static table depends
// only on the grid and is reused across lambda.
struct CorrectionTable;
std::shared_ptr<const CorrectionTable> build_correction(const BallGrid& grid);
BSMatrix assemble_bs_corrected(const Potential& V, const BallGrid& grid,
                               std::shared_ptr<const CorrectionTable> table, cplx lambda);

// Lambda-independent half of an assembly: pairwise distances, and for the
// corrected mode the defect-corrected static kernel. Building it once and
// passing it to the overloads below amortizes most of the per-node cost when
// the same grid is assembled at many lambda (contours, sweeps).
struct StaticKernel {
  Eigen::MatrixXd dist;        // pairwise node distances, zero diagonal
  Eigen::MatrixXd static_part; // corrected static kernel; empty in plain mode
};
std::shared_ptr<const StaticKernel> build_static_kernel(std::shared_ptr<const SpaceGrid> grid);
std::shared_ptr<const StaticKernel> build_static_kernel(const BallGrid& grid,
                                                        std::shared_ptr<const CorrectionTable> table);
BSMatrix assemble_bs(const Potential& V, std::shared_ptr<const SpaceGrid> grid,
                     std::shared_ptr<const StaticKernel> pre, cplx lambda);
BSMatrix assemble_bs_corrected(const Potential& V, const BallGrid& grid,
                               std::shared_ptr<const CorrectionTable> table,
                               std::shared_ptr<const StaticKernel> pre, cplx lambda);

// Matrix of BS(lambda) - BS(-lambda): entire kernel 2i sin(lambda r)/(4 pi r),
// diagonal 2i lambda/(4 pi).
BSMatrix bs_difference(const Potential& V, std::shared_ptr<const SpaceGrid> grid, cplx lambda);

// Grid sized to about target_n nodes covering the support (balls, tubes,
// bump sums) or the radius where a decaying profile drops below e^{-25} of
// its peak. Throws for dim != 3.
std::shared_ptr<const SpaceGrid> default_grid(const Potential& V, int target_n);

SingularSpectrum singular_values(const BSMatrix& M);

double schatten_norm(const SingularSpectrum& S, double p);
// sup_N N^{1/p-1} sum_{k<=N} s_k; requires p > 1.
double weak_schatten_norm(const SingularSpectrum& S, double p);

// Least squares of log s_k against log k (Power) or sqrt(k) (StretchedExp)
// over [k_lo, k_hi] (0 => automatic window, values above noise floor).
DecayFit fit_decay(const SingularSpectrum& S, DecayModel model, int k_lo = 0, int k_hi = 0);

}  // namespace rescount
