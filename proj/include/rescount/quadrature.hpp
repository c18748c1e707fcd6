#pragma once

#include <Eigen/Core>
#include <array>
#include <memory>
#include <vector>

#include "rescount/common.hpp"

namespace rescount {

// Gauss-Legendre nodes/weights on [-1,1]. Exact for polynomials of degree 2n-1.
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

// Quadrature rule on the unit sphere S^2, exact for spherical harmonics up to
// `degree`: product of Gauss-Legendre in cos(theta) and uniform trapezoid in
// azimuth. Weights sum to 4*pi.
struct SphereRule {
  std::vector<Eigen::Vector3d> nodes;
  std::vector<double> weights;
  int degree = 0;
};

SphereRule sphere_rule(int degree);

// Degree required to resolve exp(i*lambda*z.xi) on S^2 for |z| <= diameter.
inline int sphere_degree_for(cplx lambda, double diameter) {
  return 2 * static_cast<int>(std::ceil(std::abs(lambda) * diameter)) + 10;
}

// Weighted spatial quadrature grid. cell_radius is the radius of the
// equivalent-volume ball of each node's cell, (3w/(4pi))^{1/3}.
struct SpaceGrid {
  std::vector<Eigen::Vector3d> nodes;
  std::vector<double> weights;
  std::vector<double> cell_radius;
  int size() const { return static_cast<int>(nodes.size()); }
};

// 1D axis of a product grid: interior nodes plus cell edges (edges at node
// midpoints, closed at the axis bounds). edges.size() == nodes.size()+1.
struct Axis {
  std::vector<double> nodes;
  std::vector<double> edges;
};

// Product grid on the ball B(0,R): Gauss-Legendre radial x Gauss-Legendre in
// cos(theta) x uniform azimuth. Node (i,j,k) sits at flat index (i*nt+j)*nph+k.
// The azimuth cell k spans phi_k +- pi/nph (wraps at k=0).
struct BallGrid {
  double R = 1.0;
  int nr = 0, nt = 0, nph = 0;
  Axis radial;   // r in (0,R)
  Axis polar;    // t = cos(theta) in (-1,1)
  Axis azimuth;  // phi_k = 2*pi*k/nph; edges phi_k - pi/nph
  std::shared_ptr<const SpaceGrid> grid;
  int flat(int i, int j, int k) const { return (i * nt + j) * nph + k; }
};

BallGrid ball_grid(int nr, int nt, int nph, double R);

// Convenience: ball grid with roughly N nodes (shape nr:nt:nph ~ 1:1:2).
BallGrid ball_grid_for(int target_n, double R);

// Grid on the tube {|x1| <= R, |x'| <= sqrt(R)}: Gauss-Legendre along x1 x
// polar Gauss-Legendre x uniform azimuth on the cross-section disc.
std::shared_ptr<const SpaceGrid> tube_grid(int nx, int nr, int nph, double R);

// Union of ball grids translated to the given centers (disjoint supports).
std::shared_ptr<const SpaceGrid> sparse_grid(const std::vector<Eigen::Vector3d>& centers,
                                             const std::vector<double>& radii, int nr, int nt,
                                             int nph);

}  // namespace rescount
