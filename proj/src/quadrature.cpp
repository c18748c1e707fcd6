#include "rescount/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace rescount {

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw error("gauss_legendre: n must be >= 1");
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  // Newton iteration on P_n from the Chebyshev-like initial guess.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * pp * pp);
  }
  if (n % 2 == 1) nodes[n / 2] = 0.0;
}

SphereRule sphere_rule(int degree) {
  if (degree < 0) throw error("sphere_rule: degree must be >= 0");
  const int npolar = degree / 2 + 1;      // GL exact to 2*npolar-1 >= degree
  const int naz = degree + 1;             // trapezoid kills |m| <= degree
  std::vector<double> t, wt;
  gauss_legendre(npolar, t, wt);
  SphereRule rule;
  rule.degree = degree;
  rule.nodes.reserve(static_cast<size_t>(npolar) * naz);
  rule.weights.reserve(static_cast<size_t>(npolar) * naz);
  const double waz = 2.0 * pi / naz;
  for (int j = 0; j < npolar; ++j) {
    const double st = std::sqrt(std::max(0.0, 1.0 - t[j] * t[j]));
    for (int k = 0; k < naz; ++k) {
      const double phi = waz * k;
      rule.nodes.emplace_back(st * std::cos(phi), st * std::sin(phi), t[j]);
      rule.weights.push_back(wt[j] * waz);
    }
  }
  return rule;
}

namespace {

Axis axis_from_gl(int n, double lo, double hi) {
  std::vector<double> x, w;
  gauss_legendre(n, x, w);
  Axis a;
  a.nodes.resize(n);
  for (int i = 0; i < n; ++i) a.nodes[i] = 0.5 * (hi - lo) * (x[i] + 1.0) + lo;
  a.edges.resize(n + 1);
  a.edges[0] = lo;
  a.edges[n] = hi;
  for (int i = 1; i < n; ++i) a.edges[i] = 0.5 * (a.nodes[i - 1] + a.nodes[i]);
  return a;
}

void fill_cell_radius(SpaceGrid& g) {
  g.cell_radius.resize(g.weights.size());
  for (size_t j = 0; j < g.weights.size(); ++j)
    g.cell_radius[j] = std::cbrt(3.0 * g.weights[j] / (4.0 * pi));
}

}  // namespace

BallGrid ball_grid(int nr, int nt, int nph, double R) {
  if (nr < 1 || nt < 1 || nph < 1 || R <= 0) throw error("ball_grid: bad parameters");
  BallGrid bg;
  bg.R = R;
  bg.nr = nr;
  bg.nt = nt;
  bg.nph = nph;

  std::vector<double> xr, wr, xt, wt;
  gauss_legendre(nr, xr, wr);
  gauss_legendre(nt, xt, wt);

  bg.radial = axis_from_gl(nr, 0.0, R);
  bg.polar = axis_from_gl(nt, -1.0, 1.0);
  bg.azimuth.nodes.resize(nph);
  bg.azimuth.edges.resize(nph + 1);
  for (int k = 0; k < nph; ++k) bg.azimuth.nodes[k] = 2.0 * pi * k / nph;
  for (int k = 0; k <= nph; ++k) bg.azimuth.edges[k] = 2.0 * pi * k / nph - pi / nph;

  const double wphi = 2.0 * pi / nph;
  SpaceGrid sg;
  sg.nodes.reserve(static_cast<size_t>(nr) * nt * nph);
  sg.weights.reserve(static_cast<size_t>(nr) * nt * nph);
  for (int i = 0; i < nr; ++i) {
    const double r = bg.radial.nodes[i];
    const double wrr = 0.5 * R * wr[i];
    for (int j = 0; j < nt; ++j) {
      const double ct = bg.polar.nodes[j];
      const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
      for (int k = 0; k < nph; ++k) {
        const double phi = bg.azimuth.nodes[k];
        sg.nodes.emplace_back(r * st * std::cos(phi), r * st * std::sin(phi), r * ct);
        sg.weights.push_back(r * r * wrr * wt[j] * wphi);
      }
    }
  }
  fill_cell_radius(sg);
  bg.grid = std::make_shared<const SpaceGrid>(std::move(sg));
  return bg;
}

BallGrid ball_grid_for(int target_n, double R) {
  // nr = nt = m, nph = 2m gives N = 2*m^3.
  int m = std::max(2, static_cast<int>(std::lround(std::cbrt(target_n / 2.0))));
  return ball_grid(m, m, 2 * m, R);
}

std::shared_ptr<const SpaceGrid> tube_grid(int nx, int nr, int nph, double R) {
  if (nx < 1 || nr < 1 || nph < 1 || R <= 0) throw error("tube_grid: bad parameters");
  const double rho = std::sqrt(R);  // transverse radius
  std::vector<double> xx, wx, xr, wr;
  gauss_legendre(nx, xx, wx);
  gauss_legendre(nr, xr, wr);
  SpaceGrid g;
  const double wphi = 2.0 * pi / nph;
  for (int i = 0; i < nx; ++i) {
    const double x1 = R * xx[i];
    const double wx1 = R * wx[i];
    for (int j = 0; j < nr; ++j) {
      const double r = 0.5 * rho * (xr[j] + 1.0);
      const double wrr = 0.5 * rho * wr[j] * r;  // polar measure r dr
      for (int k = 0; k < nph; ++k) {
        const double phi = wphi * k;
        g.nodes.emplace_back(x1, r * std::cos(phi), r * std::sin(phi));
        g.weights.push_back(wx1 * wrr * wphi);
      }
    }
  }
  fill_cell_radius(g);
  return std::make_shared<const SpaceGrid>(std::move(g));
}

std::shared_ptr<const SpaceGrid> sparse_grid(const std::vector<Eigen::Vector3d>& centers,
                                             const std::vector<double>& radii, int nr, int nt,
                                             int nph) {
  if (centers.size() != radii.size()) throw error("sparse_grid: centers/radii mismatch");
  SpaceGrid g;
  for (size_t b = 0; b < centers.size(); ++b) {
    BallGrid bg = ball_grid(nr, nt, nph, radii[b]);
    for (int j = 0; j < bg.grid->size(); ++j) {
      g.nodes.push_back(bg.grid->nodes[j] + centers[b]);
      g.weights.push_back(bg.grid->weights[j]);
    }
  }
  fill_cell_radius(g);
  return std::make_shared<const SpaceGrid>(std::move(g));
}

}  // namespace rescount
