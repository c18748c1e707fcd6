#include "rescount/bs.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "rescount/lapack.hpp"

namespace rescount {

namespace {

constexpr int MMAX = 6;  // moments |x-y|^{m-1}, m = 0..MMAX

struct GL6 {
  std::array<double, 6> x, w;
  GL6() {
    std::vector<double> nodes, weights;
    gauss_legendre(6, nodes, weights);
    for (int i = 0; i < 6; ++i) {
      x[i] = nodes[i];
      w[i] = weights[i];
    }
  }
};
const GL6& gl6() {
  static GL6 g;
  return g;
}

struct Box {
  double r0, r1, c0, c1, p0, p1;
};

// Moments int_cell |x-y|^{m-1} dy over a (r, cos theta, phi) box, tensor GL6,
// optionally split at an interior point (the cell's own node) into 8 boxes so
// the 1/|x-y| corner singularity sits at quadrature-box corners.
std::array<double, MMAX + 1> cell_moments(const Eigen::Vector3d& x, const Box& cell,
                                          const double* split) {
  std::vector<Box> boxes;
  if (!split) {
    boxes.push_back(cell);
  } else {
    const double rs = split[0], cs = split[1], ps = split[2];
    for (auto [r0, r1] : {std::pair{cell.r0, rs}, std::pair{rs, cell.r1}})
      for (auto [c0, c1] : {std::pair{cell.c0, cs}, std::pair{cs, cell.c1}})
        for (auto [p0, p1] : {std::pair{cell.p0, ps}, std::pair{ps, cell.p1}})
          if (r1 > r0 && c1 > c0 && p1 > p0) boxes.push_back({r0, r1, c0, c1, p0, p1});
  }
  const auto& q = gl6();
  std::array<double, MMAX + 1> out{};
  for (const Box& b : boxes) {
    double rq[6], wr[6], cq[6], wc[6], pq[6], wp[6];
    for (int i = 0; i < 6; ++i) {
      rq[i] = 0.5 * (b.r1 - b.r0) * (q.x[i] + 1.0) + b.r0;
      wr[i] = 0.5 * (b.r1 - b.r0) * q.w[i];
      cq[i] = 0.5 * (b.c1 - b.c0) * (q.x[i] + 1.0) + b.c0;
      wc[i] = 0.5 * (b.c1 - b.c0) * q.w[i];
      pq[i] = 0.5 * (b.p1 - b.p0) * (q.x[i] + 1.0) + b.p0;
      wp[i] = 0.5 * (b.p1 - b.p0) * q.w[i];
    }
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) {
        const double st = std::sqrt(std::max(1.0 - cq[j] * cq[j], 0.0));
        for (int k = 0; k < 6; ++k) {
          const Eigen::Vector3d y(rq[i] * st * std::cos(pq[k]), rq[i] * st * std::sin(pq[k]),
                                  rq[i] * cq[j]);
          const double wgt = wr[i] * wc[j] * wp[k] * rq[i] * rq[i];
          double d = std::max((y - x).norm(), 1e-14);
          double dm = 1.0 / d;  // d^{m-1} starting at m=0
          for (int m = 0; m <= MMAX; ++m) {
            out[m] += wgt * dm;
            dm *= d;
          }
        }
      }
  }
  return out;
}

const double FACT[MMAX + 1] = {1, 1, 2, 6, 24, 120, 720};

cplx principal_sqrt(cplx z) { return std::sqrt(z); }

void scale_in_place(Eigen::MatrixXcd& G, const Potential& V,
                    const std::shared_ptr<const SpaceGrid>& grid) {
  const int n = static_cast<int>(G.rows());
  Eigen::VectorXcd left(n), right(n);
  for (int j = 0; j < n; ++j) {
    const cplx v = eval_potential(V, grid->nodes[j]);
    const double sw = std::sqrt(grid->weights[j]);
    left[j] = sw * std::sqrt(std::abs(v));
    right[j] = sw * principal_sqrt(v);
  }
  G = left.asDiagonal() * G * right.asDiagonal();
}

}  // namespace

struct CorrectionTable {
  int nr, nt, nph;
  double R;
  // (J, K) ring-1 pairs with their moment rows; self pairs included
  std::vector<std::pair<int, int>> pairs;
  std::vector<std::array<double, MMAX + 1>> moments;
  std::vector<double> I0;  // exact static potential of the ball at each node
};

std::shared_ptr<const CorrectionTable> build_correction(const BallGrid& g) {
  auto tab = std::make_shared<CorrectionTable>();
  tab->nr = g.nr;
  tab->nt = g.nt;
  tab->nph = g.nph;
  tab->R = g.R;
  const auto& re = g.radial.edges;
  const auto& ce = g.polar.edges;
  const double half = pi / g.nph;
  for (int i = 0; i < g.nr; ++i)
    for (int j = 0; j < g.nt; ++j)
      for (int k = 0; k < g.nph; ++k) {
        const int J = g.flat(i, j, k);
        const Eigen::Vector3d& x = g.grid->nodes[J];
        for (int di = -1; di <= 1; ++di)
          for (int dj = -1; dj <= 1; ++dj)
            for (int dk = -1; dk <= 1; ++dk) {
              const int ii = i + di, jj = j + dj;
              const int kk = ((k + dk) % g.nph + g.nph) % g.nph;
              if (ii < 0 || ii >= g.nr || jj < 0 || jj >= g.nt) continue;
              const int K = g.flat(ii, jj, kk);
              const Box cell{re[ii], re[ii + 1], ce[jj], ce[jj + 1],
                             g.azimuth.nodes[kk] - half, g.azimuth.nodes[kk] + half};
              const bool self = (ii == i && jj == j && kk == k);
              const double split[3] = {g.radial.nodes[i], g.polar.nodes[j],
                                       g.azimuth.nodes[k]};
              tab->pairs.emplace_back(J, K);
              tab->moments.push_back(cell_moments(x, cell, self ? split : nullptr));
            }
      }
  tab->I0.resize(g.grid->size());
  for (int J = 0; J < g.grid->size(); ++J)
    tab->I0[J] = (3.0 * g.R * g.R - g.grid->nodes[J].squaredNorm()) / 6.0;
  return tab;
}

namespace {

Eigen::MatrixXd dist_matrix(const SpaceGrid& g) {
  const int n = g.size();
  Eigen::MatrixXd D(n, n);
  for (int j = 0; j < n; ++j) {
    D(j, j) = 0.0;
    for (int k = j + 1; k < n; ++k) {
      const double d = (g.nodes[j] - g.nodes[k]).norm();
      D(j, k) = d;
      D(k, j) = d;
    }
  }
  return D;
}

}  // namespace

std::shared_ptr<const StaticKernel> build_static_kernel(std::shared_ptr<const SpaceGrid> grid) {
  auto out = std::make_shared<StaticKernel>();
  out->dist = dist_matrix(*grid);
  return out;
}

std::shared_ptr<const StaticKernel> build_static_kernel(
    const BallGrid& g, std::shared_ptr<const CorrectionTable> tab) {
  if (!tab || tab->nr != g.nr || tab->nt != g.nt || tab->nph != g.nph)
    throw error("build_static_kernel: correction table does not match the grid");
  auto out = std::make_shared<StaticKernel>();
  out->dist = dist_matrix(*g.grid);
  const int n = g.grid->size();
  const auto& w = g.grid->weights;
  Eigen::MatrixXd Gs(n, n);  // static part, exact on ring-1 cells
  for (int j = 0; j < n; ++j) {
    Gs(j, j) = 0.0;
    for (int k = j + 1; k < n; ++k) {
      const double s = 1.0 / (4.0 * pi * out->dist(j, k));
      Gs(j, k) = s;
      Gs(k, j) = s;
    }
  }
  for (size_t t = 0; t < tab->pairs.size(); ++t) {
    const auto [J, K] = tab->pairs[t];
    Gs(J, K) = tab->moments[t][0] / (4.0 * pi * w[K]);
  }
  Gs = 0.5 * (Gs + Gs.transpose()).eval();
  // defect correction: restore exact row integrals of the static kernel
  for (int j = 0; j < n; ++j) {
    double rowsum = 0.0;
    for (int k = 0; k < n; ++k) rowsum += Gs(j, k) * w[k];
    Gs(j, j) += (tab->I0[j] - rowsum) / w[j];
  }
  out->static_part = std::move(Gs);
  return out;
}

BSMatrix assemble_bs(const Potential& V, std::shared_ptr<const SpaceGrid> grid,
                     std::shared_ptr<const StaticKernel> pre, cplx lambda) {
  validate(V);
  const int n = grid->size();
  if (!pre || pre->dist.rows() != n) throw error("assemble_bs: static kernel mismatch");
  BSMatrix out;
  out.lambda = lambda;
  out.grid = grid;
  out.potential = V;
  out.mode = AssemblyMode::CellAverage;
  Eigen::MatrixXcd G(n, n);
  for (int j = 0; j < n; ++j) {
    G(j, j) = 3.0 / (8.0 * pi * grid->cell_radius[j]);
    for (int k = j + 1; k < n; ++k) {
      const double d = pre->dist(j, k);
      const cplx v = std::exp(iu * lambda * d) / (4.0 * pi * d);
      G(j, k) = v;
      G(k, j) = v;
    }
  }
  scale_in_place(G, V, grid);
  out.entries = std::move(G);
  return out;
}

BSMatrix assemble_bs(const Potential& V, std::shared_ptr<const SpaceGrid> grid, cplx lambda) {
  return assemble_bs(V, grid, build_static_kernel(grid), lambda);
}

BSMatrix assemble_bs_corrected(const Potential& V, const BallGrid& g,
                               std::shared_ptr<const CorrectionTable> tab,
                               std::shared_ptr<const StaticKernel> pre, cplx lambda) {
  validate(V);
  const auto* ball = std::get_if<BallIndicator>(&V.v);
  if (!ball || ball->R != g.R)
    throw error("assemble_bs_corrected: requires a uniform ball potential on its own grid");
  if (!tab || tab->nr != g.nr || tab->nt != g.nt || tab->nph != g.nph)
    throw error("assemble_bs_corrected: correction table does not match the grid");
  const int n = g.grid->size();
  if (!pre || pre->static_part.rows() != n)
    throw error("assemble_bs_corrected: static kernel mismatch");
  const auto& w = g.grid->weights;

  // static part + oscillatory part (e^{i lam d}-1)/(4 pi d)
  Eigen::MatrixXcd G(n, n);
  for (int j = 0; j < n; ++j) {
    G(j, j) = pre->static_part(j, j) + iu * lambda / (4.0 * pi);
    for (int k = j + 1; k < n; ++k) {
      const double d = pre->dist(j, k);
      const cplx o = (std::exp(iu * lambda * d) - 1.0) / (4.0 * pi * d);
      G(j, k) = pre->static_part(j, k) + o;
      G(k, j) = pre->static_part(k, j) + o;
    }
  }
  for (size_t t = 0; t < tab->pairs.size(); ++t) {
    const auto [J, K] = tab->pairs[t];
    if (J != K) continue;  // self cell: oscillatory part from the moment series
    cplx osc = 0.0;
    const cplx il = iu * lambda;
    cplx p = il;
    for (int m = 1; m <= MMAX; ++m) {
      osc += p / (4.0 * pi * FACT[m]) * tab->moments[t][m];
      p *= il;
    }
    G(J, J) = pre->static_part(J, J) + osc / w[J];
  }

  BSMatrix out;
  out.lambda = lambda;
  out.grid = g.grid;
  out.potential = V;
  out.mode = AssemblyMode::Corrected;
  scale_in_place(G, V, g.grid);
  out.entries = std::move(G);
  return out;
}

BSMatrix assemble_bs_corrected(const Potential& V, const BallGrid& g,
                               std::shared_ptr<const CorrectionTable> tab, cplx lambda) {
  return assemble_bs_corrected(V, g, tab, build_static_kernel(g, tab), lambda);
}

BSMatrix bs_difference(const Potential& V, std::shared_ptr<const SpaceGrid> grid, cplx lambda) {
  validate(V);
  const int n = grid->size();
  BSMatrix out;
  out.lambda = lambda;
  out.grid = grid;
  out.potential = V;
  Eigen::MatrixXcd G(n, n);
  for (int j = 0; j < n; ++j) {
    G(j, j) = 2.0 * iu * lambda / (4.0 * pi);
    for (int k = j + 1; k < n; ++k) {
      const double d = (grid->nodes[j] - grid->nodes[k]).norm();
      const cplx v = 2.0 * iu * std::sin(lambda * d) / (4.0 * pi * d);
      G(j, k) = v;
      G(k, j) = v;
    }
  }
  scale_in_place(G, V, grid);
  out.entries = std::move(G);
  return out;
}

std::shared_ptr<const SpaceGrid> default_grid(const Potential& V, int target_n) {
  validate(V);
  if (V.dim != 3) throw error("default_grid: grids are built for dim 3 only");
  if (target_n < 8) throw error("default_grid: target_n too small");
  if (const auto* b = std::get_if<BallIndicator>(&V.v)) return ball_grid_for(target_n, b->R).grid;
  if (const auto* t = std::get_if<RadialTable>(&V.v))
    return ball_grid_for(target_n, t->radii.back()).grid;
  if (const auto* t = std::get_if<TubeIndicator>(&V.v)) {
    const int m = std::max(2, static_cast<int>(std::lround(std::cbrt(target_n / 4.0))));
    const int nx = std::max(2, static_cast<int>(std::lround(target_n / (2.0 * m * m))));
    return tube_grid(nx, m, 2 * m, t->R);
  }
  if (const auto* s = std::get_if<SparseSum>(&V.v)) {
    std::vector<Eigen::Vector3d> centers;
    std::vector<double> radii;
    for (const auto& b : s->bumps) {
      centers.push_back(b.center);
      radii.push_back(b.radius);
    }
    const int per = std::max(8, target_n / std::max<int>(1, s->bumps.size()));
    const int m = std::max(2, static_cast<int>(std::lround(std::cbrt(per / 2.0))));
    return sparse_grid(centers, radii, m, m, 2 * m);
  }
  if (const auto* e = std::get_if<ExpProfile>(&V.v)) {
    const double rt = std::pow(25.0 / e->c, 1.0 / (1.0 + e->eps));
    return ball_grid_for(target_n, rt).grid;
  }
  return std::get<GridSampled>(V.v).grid;
}

SingularSpectrum singular_values(const BSMatrix& M) {
  SingularSpectrum out;
  out.lambda = M.lambda;
  const Eigen::VectorXd sv = singular_values_dense(M.entries);
  out.values.assign(sv.data(), sv.data() + sv.size());
  return out;
}

double schatten_norm(const SingularSpectrum& S, double p) {
  if (p <= 0.0) throw error("schatten_norm: p must be > 0");
  double acc = 0.0;
  for (double s : S.values) acc += std::pow(s, p);
  return std::pow(acc, 1.0 / p);
}

double weak_schatten_norm(const SingularSpectrum& S, double p) {
  if (p <= 1.0) throw error("weak_schatten_norm: p must be > 1");
  double acc = 0.0, best = 0.0;
  for (size_t N = 1; N <= S.values.size(); ++N) {
    acc += S.values[N - 1];
    best = std::max(best, std::pow(static_cast<double>(N), 1.0 / p - 1.0) * acc);
  }
  return best;
}

DecayFit fit_decay(const SingularSpectrum& S, DecayModel model, int k_lo, int k_hi) {
  const auto& s = S.values;
  const int n = static_cast<int>(s.size());
  if (n == 0) throw error("fit_decay: empty spectrum");
  const double floor_val = std::max(1e3 * 2.2e-16 * s[0], 1e-300);
  if (k_lo <= 0) k_lo = 1;
  if (k_hi <= 0) {
    k_hi = k_lo;
    while (k_hi < n && s[k_hi] > floor_val) ++k_hi;
  }
  k_hi = std::min(k_hi, n);
  std::vector<double> xs, ys;
  for (int k = k_lo; k <= k_hi; ++k) {
    if (s[k - 1] <= floor_val) break;
    xs.push_back(model == DecayModel::Power ? std::log(static_cast<double>(k))
                                            : std::sqrt(static_cast<double>(k)));
    ys.push_back(std::log(s[k - 1]));
  }
  if (xs.size() < 10) throw error("fit_decay: fewer than 10 usable values in the fit window");
  const double m = xs.size();
  const double sx = std::accumulate(xs.begin(), xs.end(), 0.0);
  const double sy = std::accumulate(ys.begin(), ys.end(), 0.0);
  double sxx = 0, sxy = 0, syy = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
    syy += ys[i] * ys[i];
  }
  const double denom = m * sxx - sx * sx;
  DecayFit fit;
  fit.slope = (m * sxy - sx * sy) / denom;
  fit.prefactor = std::exp((sy - fit.slope * sx) / m);
  const double sst = syy - sy * sy / m;
  double sse = 0.0;
  const double b = (sy - fit.slope * sx) / m;
  for (size_t i = 0; i < xs.size(); ++i) {
    const double e = ys[i] - (fit.slope * xs[i] + b);
    sse += e * e;
  }
  fit.r2 = (sst > 0) ? 1.0 - sse / sst : 1.0;
  fit.k_lo = k_lo;
  fit.k_hi = k_lo + static_cast<int>(xs.size()) - 1;
  return fit;
}

}  // namespace rescount
