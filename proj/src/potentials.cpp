#include "rescount/potentials.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>

namespace rescount {

namespace {

double norm3(const Eigen::Vector3d& x) { return x.norm(); }

// Volume of the intersection of B(0,t) with a ball of radius a at distance
// rho from the origin (d=3).
double lens_volume(double t, double a, double rho) {
  if (t <= 0.0) return 0.0;
  if (rho >= t + a) return 0.0;
  if (t >= rho + a) return ball_volume(3, a);
  if (a >= rho + t) return ball_volume(3, t);
  const double c = t + a - rho;
  return pi * c * c *
         (rho * rho + 2.0 * rho * a - 3.0 * a * a + 2.0 * rho * t + 6.0 * a * t -
          3.0 * t * t) /
         (12.0 * rho);
}

struct AdaptiveSimpson {
  std::function<double(double)> f;
  double tol;
  int max_depth = 40;

  double run(double a, double b) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    return recurse(a, b, fa, fm, fb, simpson(a, b, fa, fm, fb), max_depth);
  }

 private:
  static double simpson(double a, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  }
  double recurse(double a, double b, double fa, double fm, double fb, double whole,
                 int depth) {
    const double m = 0.5 * (a + b);
    const double fl = f(0.5 * (a + m)), fr = f(0.5 * (m + b));
    const double left = simpson(a, m, fa, fl, fm), right = simpson(m, b, fm, fr, fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
      return left + right + (left + right - whole) / 15.0;
    return recurse(a, m, fa, fl, fm, left, depth - 1) +
           recurse(m, b, fm, fr, fb, right, depth - 1);
  }
};

// Distribution function alpha -> |{ e^{2 gamma |x|} |V(x)| > alpha }| together
// with its breakpoints (alphas where it jumps or kinks) and its essential sup.
struct WeightedProfile {
  std::function<double(double)> mu;
  std::vector<double> breakpoints;
  double alpha_max = 0;  // mu vanishes above this
};

// root of g(r) = target for strictly monotone g on [lo, hi] by bisection.
double bisect(const std::function<double(double)>& g, double lo, double hi, double target,
              bool increasing) {
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if ((g(mid) > target) == increasing)
      hi = mid;
    else
      lo = mid;
    if (hi - lo < 1e-15 * std::max(1.0, std::abs(hi))) break;
  }
  return 0.5 * (lo + hi);
}

WeightedProfile weighted_profile(const Potential& V, double gamma);

WeightedProfile profile_ball(int d, double R, double habs, double gamma) {
  WeightedProfile w;
  w.alpha_max = habs * std::exp(2.0 * gamma * R);
  w.breakpoints = {habs, w.alpha_max};
  w.mu = [=](double alpha) -> double {
    if (alpha >= w.alpha_max || habs == 0.0) return 0.0;
    if (alpha < habs || gamma == 0.0) return ball_volume(d, R);
    const double r = std::log(alpha / habs) / (2.0 * gamma);
    return ball_volume(d, R) - ball_volume(d, std::min(r, R));
  };
  return w;
}

WeightedProfile profile_radial_table(int d, const RadialTable& T, double gamma) {
  WeightedProfile w;
  w.alpha_max = 0.0;
  for (size_t i = 0; i < T.values.size(); ++i) {
    const double habs = std::abs(T.values[i]);
    if (habs == 0.0) continue;
    w.breakpoints.push_back(habs * std::exp(2.0 * gamma * T.radii[i]));
    w.breakpoints.push_back(habs * std::exp(2.0 * gamma * T.radii[i + 1]));
    w.alpha_max = std::max(w.alpha_max, w.breakpoints.back());
  }
  w.mu = [d, T, gamma](double alpha) -> double {
    double total = 0.0;
    for (size_t i = 0; i < T.values.size(); ++i) {
      const double habs = std::abs(T.values[i]);
      if (habs == 0.0) continue;
      const double a = T.radii[i], b = T.radii[i + 1];
      const double lo = habs * std::exp(2.0 * gamma * a);
      const double hi = habs * std::exp(2.0 * gamma * b);
      if (alpha < lo)
        total += ball_volume(d, b) - ball_volume(d, a);
      else if (alpha < hi && gamma > 0.0) {
        const double r = std::log(alpha / habs) / (2.0 * gamma);
        total += ball_volume(d, b) - ball_volume(d, std::max(a, std::min(r, b)));
      }
    }
    return total;
  };
  return w;
}

WeightedProfile profile_sparse(const SparseSum& S, double gamma) {
  WeightedProfile w;
  w.alpha_max = 0.0;
  for (const auto& bump : S.bumps) {
    const double habs = std::abs(bump.h);
    if (habs == 0.0) continue;
    const double rho = norm3(bump.center);
    const double rmin = std::max(0.0, rho - bump.radius);
    w.breakpoints.push_back(habs * std::exp(2.0 * gamma * rmin));
    if (bump.radius > rho)  // |x|=t sphere leaves the bump tangentially at t = a - rho
      w.breakpoints.push_back(habs * std::exp(2.0 * gamma * (bump.radius - rho)));
    w.breakpoints.push_back(habs * std::exp(2.0 * gamma * (rho + bump.radius)));
    w.alpha_max = std::max(w.alpha_max, w.breakpoints.back());
  }
  w.mu = [S, gamma](double alpha) -> double {
    double total = 0.0;
    for (const auto& bump : S.bumps) {
      const double habs = std::abs(bump.h);
      if (habs == 0.0 || alpha >= habs * std::exp(2.0 * gamma * (norm3(bump.center) + bump.radius)))
        continue;
      if (alpha < habs || gamma == 0.0) {
        total += ball_volume(3, bump.radius);
        continue;
      }
      const double t = std::log(alpha / habs) / (2.0 * gamma);
      const double rho = norm3(bump.center);
      if (rho < 1e-14 * (t + bump.radius))
        total += ball_volume(3, bump.radius) - ball_volume(3, std::min(t, bump.radius));
      else
        total += ball_volume(3, bump.radius) - lens_volume(t, bump.radius, rho);
    }
    return total;
  };
  return w;
}

WeightedProfile profile_exp(int d, const ExpProfile& E, double gamma) {
  if (E.c <= 0.0) throw error("ExpProfile: divergent (c <= 0)");
  if (E.eps <= 0.0 && gamma > 0.0) throw error("ExpProfile: infinite weighted profile (eps <= 0)");
  WeightedProfile w;
  const double p1 = 1.0 + E.eps;
  auto g = [&](double r) { return 2.0 * gamma * r - E.c * std::pow(r, p1); };
  double rstar = 0.0, gmax = 0.0;
  if (gamma > 0.0) {
    rstar = std::pow(2.0 * gamma / (E.c * p1), 1.0 / E.eps);
    gmax = g(rstar);
  }
  w.alpha_max = std::exp(gmax);
  w.breakpoints = {1.0, w.alpha_max};
  w.mu = [=](double alpha) -> double {
    if (alpha >= w.alpha_max) return 0.0;
    const double la = std::log(alpha);
    // right root of g = la, beyond rstar
    double hi = std::max(rstar, 1.0);
    while (g(hi) > la) hi *= 2.0;
    const double r2 = bisect(g, rstar, hi, la, false);
    if (la < 0.0) return ball_volume(d, r2);
    const double r1 = bisect(g, 0.0, rstar, la, true);
    return ball_volume(d, r2) - ball_volume(d, r1);
  };
  return w;
}

WeightedProfile weighted_profile(const Potential& V, double gamma) {
  const int d = V.dim;
  if (const auto* b = std::get_if<BallIndicator>(&V.v))
    return profile_ball(d, b->R, std::abs(b->h), gamma);
  if (const auto* t = std::get_if<RadialTable>(&V.v)) return profile_radial_table(d, *t, gamma);
  if (const auto* s = std::get_if<SparseSum>(&V.v)) return profile_sparse(*s, gamma);
  if (const auto* e = std::get_if<ExpProfile>(&V.v)) return profile_exp(d, *e, gamma);
  if (const auto* tu = std::get_if<TubeIndicator>(&V.v)) {
    // {x in T_R : |x| > t} has volume 2R*pi*R - integral of the disc overlap.
    const double R = tu->R, habs = std::abs(tu->h);
    WeightedProfile w;
    const double diag = std::sqrt(R * R + R);  // max |x| on the tube
    w.alpha_max = habs * std::exp(2.0 * gamma * diag);
    w.breakpoints = {habs, habs * std::exp(2.0 * gamma * std::sqrt(R)),
                     habs * std::exp(2.0 * gamma * R), w.alpha_max};
    w.mu = [=](double alpha) -> double {
      if (alpha >= w.alpha_max || habs == 0.0) return 0.0;
      const double full = 2.0 * R * pi * R;
      if (alpha < habs || gamma == 0.0) return full;
      const double t = std::log(alpha / habs) / (2.0 * gamma);
      // volume of T_R inside |x| <= t: slice area is pi*min(t^2 - x1^2, R),
      // constant pi*R up to x1k = sqrt(max(0, t^2 - R)), spherical cap beyond.
      const double xmax = std::min(R, t);
      const double x1k = std::min(xmax, std::sqrt(std::max(0.0, t * t - R)));
      auto cap = [&](double x) { return t * t * x - x * x * x / 3.0; };
      const double inner = 2.0 * (pi * R * x1k + pi * (cap(xmax) - cap(x1k)));
      return full - inner;
    };
    return w;
  }
  throw error("weighted_profile: unsupported variant");
}

double golden_max(const std::function<double(double)>& f, double lo, double hi) {
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 300 && (b - a) > 1e-13 * std::max(1.0, std::abs(b)); ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = f(d);
    }
  }
  return std::max(fc, fd);
}

}  // namespace

void validate(const Potential& V) {
  if (V.dim != 1 && V.dim != 3) throw error("Potential: dim must be 1 or 3");
  if (const auto* t = std::get_if<RadialTable>(&V.v)) {
    if (t->radii.size() != t->values.size() + 1)
      throw error("RadialTable: radii.size() must equal values.size()+1");
    if (t->radii.front() < 0.0) throw error("RadialTable: first radius must be >= 0");
    for (size_t i = 1; i < t->radii.size(); ++i)
      if (t->radii[i] <= t->radii[i - 1]) throw error("RadialTable: radii not strictly increasing");
  }
  if (const auto* s = std::get_if<SparseSum>(&V.v)) {
    if (V.dim != 3) throw error("SparseSum: dim must be 3");
    for (size_t i = 0; i < s->bumps.size(); ++i)
      for (size_t j = i + 1; j < s->bumps.size(); ++j) {
        const double dist = (s->bumps[i].center - s->bumps[j].center).norm();
        if (dist <= s->bumps[i].radius + s->bumps[j].radius)
          throw error("SparseSum: bump closures must be pairwise disjoint");
      }
  }
  if (std::holds_alternative<TubeIndicator>(V.v) && V.dim != 3)
    throw error("TubeIndicator: dim must be 3");
  if (const auto* g = std::get_if<GridSampled>(&V.v)) {
    if (!g->grid) throw error("GridSampled: null grid");
    if (static_cast<int>(g->values.size()) != g->grid->size())
      throw error("GridSampled: values/grid size mismatch");
  }
}

cplx eval_potential(const Potential& V, const Eigen::Vector3d& x) {
  validate(V);
  const double r = (V.dim == 1) ? std::abs(x[0]) : norm3(x);
  if (const auto* b = std::get_if<BallIndicator>(&V.v)) return r <= b->R ? b->h : cplx(0);
  if (const auto* t = std::get_if<TubeIndicator>(&V.v)) {
    const double rt = std::hypot(x[1], x[2]);
    return (std::abs(x[0]) <= t->R && rt <= std::sqrt(t->R)) ? t->h : cplx(0);
  }
  if (const auto* t = std::get_if<RadialTable>(&V.v)) {
    auto it = std::upper_bound(t->radii.begin(), t->radii.end(), r);
    if (it == t->radii.begin() || it == t->radii.end()) return cplx(0);
    return t->values[static_cast<size_t>(it - t->radii.begin()) - 1];
  }
  if (const auto* s = std::get_if<SparseSum>(&V.v)) {
    for (const auto& bump : s->bumps)
      if ((x - bump.center).norm() <= bump.radius) return bump.h;
    return cplx(0);
  }
  if (const auto* e = std::get_if<ExpProfile>(&V.v))
    return std::exp(-e->c * std::pow(r, 1.0 + e->eps));
  if (const auto* g = std::get_if<GridSampled>(&V.v)) {
    int best = 0;
    double bd = std::numeric_limits<double>::max();
    for (int j = 0; j < g->grid->size(); ++j) {
      const double dj = (g->grid->nodes[j] - x).norm();
      if (dj < bd) {
        bd = dj;
        best = j;
      }
    }
    return g->values[best];
  }
  throw error("eval_potential: unsupported variant");
}

double lp_norm(const Potential& V, double p) {
  validate(V);
  if (p < 1.0) throw error("lp_norm: p must be >= 1");
  const int d = V.dim;
  if (const auto* b = std::get_if<BallIndicator>(&V.v))
    return std::abs(b->h) * std::pow(ball_volume(d, b->R), 1.0 / p);
  if (const auto* t = std::get_if<TubeIndicator>(&V.v))
    return std::abs(t->h) * std::pow(2.0 * t->R * pi * t->R, 1.0 / p);
  if (const auto* t = std::get_if<RadialTable>(&V.v)) {
    double acc = 0.0;
    for (size_t i = 0; i < t->values.size(); ++i)
      acc += std::pow(std::abs(t->values[i]), p) *
             (ball_volume(d, t->radii[i + 1]) - ball_volume(d, t->radii[i]));
    return std::pow(acc, 1.0 / p);
  }
  if (const auto* s = std::get_if<SparseSum>(&V.v)) {
    double acc = 0.0;
    for (const auto& bump : s->bumps)
      acc += std::pow(std::abs(bump.h), p) * ball_volume(3, bump.radius);
    return std::pow(acc, 1.0 / p);
  }
  if (const auto* e = std::get_if<ExpProfile>(&V.v)) {
    if (e->c <= 0.0) throw error("lp_norm: ExpProfile divergent (c <= 0)");
    const double p1 = 1.0 + e->eps;
    if (p1 <= 0.0) throw error("lp_norm: ExpProfile divergent (eps <= -1)");
    const double surf = (d == 3) ? 4.0 * pi : 2.0;
    auto integrand = [&](double r) {
      return surf * std::pow(r, d - 1) * std::exp(-p * e->c * std::pow(r, p1));
    };
    const double rcut = std::pow(80.0 / (p * e->c), 1.0 / p1);
    AdaptiveSimpson as{integrand, 0.0};
    as.tol = 1e-11 * integrand(std::pow(1.0 / (p * e->c * p1), 1.0 / p1)) * rcut;
    return std::pow(as.run(0.0, rcut), 1.0 / p);
  }
  if (const auto* g = std::get_if<GridSampled>(&V.v)) {
    double acc = 0.0;
    for (int j = 0; j < g->grid->size(); ++j)
      acc += g->grid->weights[j] * std::pow(std::abs(g->values[j]), p);
    return std::pow(acc, 1.0 / p);
  }
  throw error("lp_norm: unsupported variant");
}

double lorentz_quasinorm(const Potential& V, double p, double q, double gamma) {
  validate(V);
  if (p <= 0.0 || q <= 0.0) throw error("lorentz_quasinorm: p, q must be > 0");
  if (gamma < 0.0) throw error("lorentz_quasinorm: gamma must be >= 0");

  // Discrete layer-cake is exact for grid-sampled values.
  if (const auto* g = std::get_if<GridSampled>(&V.v)) {
    std::vector<std::pair<double, double>> fv;  // (weighted value, weight)
    for (int j = 0; j < g->grid->size(); ++j)
      fv.emplace_back(std::exp(2.0 * gamma * norm3(g->grid->nodes[j])) * std::abs(g->values[j]),
                      g->grid->weights[j]);
    std::sort(fv.begin(), fv.end(), [](auto& a, auto& b) { return a.first > b.first; });
    double acc = 0.0, mass = 0.0;
    for (size_t j = 0; j < fv.size(); ++j) {
      mass += fv[j].second;
      const double hi = fv[j].first;
      const double lo = (j + 1 < fv.size()) ? fv[j + 1].first : 0.0;
      acc += std::pow(mass, q / p) * (std::pow(hi, q) - std::pow(lo, q)) / q;
    }
    return std::pow(p, 1.0 / q) * std::pow(acc, 1.0 / q);
  }

  WeightedProfile w = weighted_profile(V, gamma);
  if (w.alpha_max <= 0.0) return 0.0;
  const double amin = 1e-12 * w.alpha_max;

  std::vector<double> cuts = w.breakpoints;
  cuts.push_back(amin);
  cuts.push_back(w.alpha_max);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [&](double a, double b) { return std::abs(a - b) < 1e-15 * w.alpha_max; }),
             cuts.end());

  // integral of alpha^{q-1} mu(alpha)^{q/p} in u = ln(alpha), composite
  // midpoint with Richardson, split at breakpoints of mu.  Midpoint avoids
  // evaluating at the cuts, where mu may jump.
  auto integrand_u = [&](double u) {
    const double alpha = std::exp(u);
    return std::pow(alpha, q) * std::pow(w.mu(alpha), q / p);
  };
  const double u_lo = std::log(amin), u_hi = std::log(w.alpha_max);
  const double u_span = u_hi - u_lo;
  double total = 0.0;
  for (size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = std::max(cuts[i], amin), b = std::min(cuts[i + 1], w.alpha_max);
    if (b <= a) continue;
    const double ua = std::log(a), ub = std::log(b);
    int n = std::max(8, static_cast<int>(std::lround(2048.0 * (ub - ua) / u_span)));
    n += n % 2;  // even for the half-n pass
    auto midpt = [&](int m) {
      const double h = (ub - ua) / m;
      double s = 0.0;
      for (int k = 0; k < m; ++k) s += integrand_u(ua + (k + 0.5) * h);
      return s * h;
    };
    const double in = midpt(n), in2 = midpt(n / 2);
    total += in + (in - in2) / 3.0;
  }
  // tail below the cutoff, with mu frozen at its value there
  total += std::pow(w.mu(amin), q / p) * std::pow(amin, q) / q;
  return std::pow(p, 1.0 / q) * std::pow(total, 1.0 / q);
}

PotentialNorms weighted_sup_norms(const Potential& V, double rho, double R, double gamma) {
  validate(V);
  if (rho < 0.0 || R <= 0.0 || gamma < 0.0) throw error("weighted_sup_norms: bad parameters");
  PotentialNorms out;
  out.rho = rho;
  out.R = R;
  out.gamma = gamma;
  out.dim = V.dim;

  // weight w(r) = (1+r/R)^rho e^{2 g r}, radially increasing for g >= 0
  auto wfun = [&](double r, double g) { return std::pow(1.0 + r / R, rho) * std::exp(2.0 * g * r); };

  auto sup_pair = [&](auto&& radial_sup) {
    out.v_rhoR = radial_sup(0.0);
    out.v_rhoRgamma = radial_sup(gamma);
  };

  if (const auto* b = std::get_if<BallIndicator>(&V.v)) {
    out.sup_norm = std::abs(b->h);
    sup_pair([&](double g) { return std::abs(b->h) * wfun(b->R, g); });
  } else if (const auto* t = std::get_if<TubeIndicator>(&V.v)) {
    out.sup_norm = std::abs(t->h);
    const double diag = std::sqrt(t->R * t->R + t->R);
    sup_pair([&](double g) { return std::abs(t->h) * wfun(diag, g); });
  } else if (const auto* t = std::get_if<RadialTable>(&V.v)) {
    for (const auto& v : t->values) out.sup_norm = std::max(out.sup_norm, std::abs(v));
    sup_pair([&](double g) {
      double best = 0.0;
      for (size_t i = 0; i < t->values.size(); ++i)
        best = std::max(best, std::abs(t->values[i]) * wfun(t->radii[i + 1], g));
      return best;
    });
  } else if (const auto* s = std::get_if<SparseSum>(&V.v)) {
    for (const auto& bump : s->bumps) out.sup_norm = std::max(out.sup_norm, std::abs(bump.h));
    sup_pair([&](double g) {
      double best = 0.0;
      for (const auto& bump : s->bumps)
        best = std::max(best, std::abs(bump.h) * wfun(norm3(bump.center) + bump.radius, g));
      return best;
    });
  } else if (const auto* e = std::get_if<ExpProfile>(&V.v)) {
    out.sup_norm = 1.0;
    if (e->c <= 0.0) throw error("weighted_sup_norms: infinite (ExpProfile c <= 0)");
    if (e->eps < 0.0) throw error("weighted_sup_norms: infinite (ExpProfile eps < 0)");
    if (e->eps == 0.0 && 2.0 * gamma >= e->c)
      throw error("weighted_sup_norms: infinite (weight beats decay)");
    sup_pair([&](double g) {
      auto lnf = [&](double r) {
        return rho * std::log1p(r / R) + 2.0 * g * r - e->c * std::pow(r, 1.0 + e->eps);
      };
      double hi = 1.0;
      while (lnf(hi) > lnf(0.0) - 60.0) hi *= 2.0;
      return std::exp(golden_max(lnf, 0.0, hi));
    });
  } else if (const auto* g = std::get_if<GridSampled>(&V.v)) {
    sup_pair([&](double gg) {
      double best = 0.0;
      for (int j = 0; j < g->grid->size(); ++j) {
        const double r = norm3(g->grid->nodes[j]);
        best = std::max(best, std::abs(g->values[j]) * wfun(r, gg));
        out.sup_norm = std::max(out.sup_norm, std::abs(g->values[j]));
      }
      return best;
    });
  } else {
    throw error("weighted_sup_norms: unsupported variant");
  }
  return out;
}

PotentialNorms compute_norms(const Potential& V, double gamma, double rho, double R) {
  PotentialNorms out = weighted_sup_norms(V, rho, R, gamma);
  const double p = (V.dim + 1) / 2.0;
  out.v0 = lp_norm(V, p);
  out.v_gamma = lorentz_quasinorm(V, p, 1.0, gamma);
  out.dim = V.dim;
  return out;
}

namespace {

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void put_cplx(std::ostream& os, cplx z) { os << fmt17(z.real()) << ' ' << fmt17(z.imag()); }

cplx get_cplx(std::istream& is) {
  double re, im;
  if (!(is >> re >> im)) throw error("potential_from_text: bad complex");
  return {re, im};
}

}  // namespace

std::string to_text(const Potential& V) {
  std::ostringstream os;
  os << "potential dim " << V.dim << '\n';
  if (const auto* b = std::get_if<BallIndicator>(&V.v)) {
    os << "ball R " << fmt17(b->R) << " h ";
    put_cplx(os, b->h);
    os << '\n';
  } else if (const auto* t = std::get_if<TubeIndicator>(&V.v)) {
    os << "tube R " << fmt17(t->R) << " h ";
    put_cplx(os, t->h);
    os << '\n';
  } else if (const auto* t = std::get_if<RadialTable>(&V.v)) {
    os << "radial_table shells " << t->values.size() << '\n';
    for (double r : t->radii) os << fmt17(r) << ' ';
    os << '\n';
    for (cplx v : t->values) {
      put_cplx(os, v);
      os << ' ';
    }
    os << '\n';
  } else if (const auto* s = std::get_if<SparseSum>(&V.v)) {
    os << "sparse_sum bumps " << s->bumps.size() << '\n';
    for (const auto& b : s->bumps) {
      os << fmt17(b.center[0]) << ' ' << fmt17(b.center[1]) << ' ' << fmt17(b.center[2]) << ' '
         << fmt17(b.radius) << ' ';
      put_cplx(os, b.h);
      os << '\n';
    }
  } else if (const auto* e = std::get_if<ExpProfile>(&V.v)) {
    os << "exp_profile c " << fmt17(e->c) << " eps " << fmt17(e->eps) << '\n';
  } else if (const auto* g = std::get_if<GridSampled>(&V.v)) {
    os << "grid_sampled n " << g->grid->size() << '\n';
    for (int j = 0; j < g->grid->size(); ++j) {
      const auto& x = g->grid->nodes[j];
      os << fmt17(x[0]) << ' ' << fmt17(x[1]) << ' ' << fmt17(x[2]) << ' '
         << fmt17(g->grid->weights[j]) << ' ';
      put_cplx(os, g->values[j]);
      os << '\n';
    }
  } else {
    throw error("to_text: unsupported variant");
  }
  return os.str();
}

Potential potential_from_text(const std::string& text) {
  std::istringstream is(text);
  std::string tok;
  Potential V;
  if (!(is >> tok) || tok != "potential") throw error("potential_from_text: missing header");
  if (!(is >> tok >> V.dim) || tok != "dim") throw error("potential_from_text: missing dim");
  if (!(is >> tok)) throw error("potential_from_text: missing variant");
  if (tok == "ball") {
    BallIndicator b;
    std::string kr, kh;
    is >> kr >> b.R >> kh;
    b.h = get_cplx(is);
    V.v = b;
  } else if (tok == "tube") {
    TubeIndicator t;
    std::string kr, kh;
    is >> kr >> t.R >> kh;
    t.h = get_cplx(is);
    V.v = t;
  } else if (tok == "radial_table") {
    size_t n;
    std::string k;
    is >> k >> n;
    RadialTable t;
    t.radii.resize(n + 1);
    t.values.resize(n);
    for (auto& r : t.radii) is >> r;
    for (auto& v : t.values) v = get_cplx(is);
    V.v = t;
  } else if (tok == "sparse_sum") {
    size_t n;
    std::string k;
    is >> k >> n;
    SparseSum s;
    s.bumps.resize(n);
    for (auto& b : s.bumps) {
      is >> b.center[0] >> b.center[1] >> b.center[2] >> b.radius;
      b.h = get_cplx(is);
    }
    V.v = s;
  } else if (tok == "exp_profile") {
    ExpProfile e;
    std::string kc, ke;
    is >> kc >> e.c >> ke >> e.eps;
    V.v = e;
  } else if (tok == "grid_sampled") {
    size_t n;
    std::string k;
    is >> k >> n;
    auto grid = std::make_shared<SpaceGrid>();
    GridSampled g;
    grid->nodes.resize(n);
    grid->weights.resize(n);
    g.values.resize(n);
    for (size_t j = 0; j < n; ++j) {
      is >> (*grid).nodes[j][0] >> (*grid).nodes[j][1] >> (*grid).nodes[j][2] >>
          (*grid).weights[j];
      g.values[j] = get_cplx(is);
    }
    grid->cell_radius.resize(n);
    for (size_t j = 0; j < n; ++j)
      grid->cell_radius[j] = std::cbrt(3.0 * grid->weights[j] / (4.0 * pi));
    g.grid = grid;
    V.v = g;
  } else {
    throw error("potential_from_text: unknown variant " + tok);
  }
  if (is.fail()) throw error("potential_from_text: truncated input");
  validate(V);
  return V;
}

Potential dilate(const Potential& V, double s) {
  validate(V);
  if (s <= 0.0) throw error("dilate: s must be > 0");
  Potential out;
  out.dim = V.dim;
  if (const auto* b = std::get_if<BallIndicator>(&V.v)) {
    out.v = BallIndicator{b->R / s, s * s * b->h};
  } else if (const auto* t = std::get_if<RadialTable>(&V.v)) {
    RadialTable r = *t;
    for (auto& x : r.radii) x /= s;
    for (auto& v : r.values) v *= s * s;
    out.v = r;
  } else if (const auto* sp = std::get_if<SparseSum>(&V.v)) {
    SparseSum r = *sp;
    for (auto& b : r.bumps) {
      b.center /= s;
      b.radius /= s;
      b.h *= s * s;
    }
    out.v = r;
  } else if (const auto* g = std::get_if<GridSampled>(&V.v)) {
    auto grid = std::make_shared<SpaceGrid>(*g->grid);
    for (auto& x : grid->nodes) x /= s;
    for (auto& w : grid->weights) w /= s * s * s;
    for (auto& c : grid->cell_radius) c /= s;
    GridSampled r;
    r.grid = grid;
    r.values = g->values;
    for (auto& v : r.values) v *= s * s;
    out.v = r;
  } else {
    throw error("dilate: variant has no dilation in-family");
  }
  return out;
}

}  // namespace rescount
