#include "rescount/counting.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <deque>

#include "rescount/bs.hpp"
#include "rescount/lapack.hpp"
#include "rescount/oracles.hpp"

namespace rescount {

namespace {

double wrap_pm_pi(double x) {
  x = std::fmod(x + pi, 2.0 * pi);
  if (x <= 0.0) x += 2.0 * pi;
  return x - pi;
}

void guard_sample(const DetSample& s) {
  if (s.on_zero) throw error("winding: determinant vanishes on the contour, perturb the radius");
  if (s.tail_estimate > 0.0 && s.log_modulus < std::log(10.0 * s.tail_estimate))
    throw error("winding: contour sample within 10x tail estimate of zero, perturb the radius");
}

int to_integer_winding(double total_phase, double tol) {
  const double w = total_phase / (2.0 * pi);
  const double r = std::round(w);
  if (std::abs(w - r) > tol) throw error("winding: phase total is not an integer multiple of 2 pi");
  return static_cast<int>(r);
}

}  // namespace

int winding_count(const std::vector<DetSample>& loop) {
  if (loop.size() < 3) throw error("winding_count: need at least 3 samples");
  if (std::abs(loop.front().lambda - loop.back().lambda) >
      1e-12 * (1.0 + std::abs(loop.front().lambda)))
    throw error("winding_count: loop is not closed (first lambda != last)");
  for (const DetSample& s : loop) guard_sample(s);
  double total = 0.0;
  for (size_t k = 0; k + 1 < loop.size(); ++k) {
    const double d = wrap_pm_pi(loop[k + 1].phase - loop[k].phase);
    if (std::abs(d) > pi / 2.0)
      throw error("winding_count: phase jump above pi/2 between samples, refine the contour");
    total += d;
  }
  return to_integer_winding(total, 1e-6);
}

int winding_count_adaptive(const std::function<DetSample(cplx)>& fn, const ContourSpec& spec) {
  if (spec.nodes < 64) throw error("winding_count_adaptive: nodes must be >= 64");
  if (spec.radius <= 0.0) throw error("winding_count_adaptive: radius must be > 0");
  std::map<double, DetSample> cache;
  auto at = [&](double theta) -> const DetSample& {
    auto it = cache.find(theta);
    if (it == cache.end()) {
      DetSample s = fn(spec.center + spec.radius * std::exp(iu * theta));
      guard_sample(s);
      it = cache.emplace(theta, s).first;
    }
    return it->second;
  };
  struct Seg {
    double a, b;
    int depth;
  };
  std::deque<Seg> work;
  for (int k = 0; k < spec.nodes; ++k)
    work.push_back({2.0 * pi * k / spec.nodes, 2.0 * pi * (k + 1) / spec.nodes, 0});
  double total = 0.0;
  while (!work.empty()) {
    const Seg s = work.front();
    work.pop_front();
    const double d = wrap_pm_pi(at(s.b).phase - at(s.a).phase);
    if (std::abs(d) > pi / 2.0) {
      if (s.depth >= spec.adaptive_depth)
        throw error("winding_count_adaptive: refinement depth exhausted");
      const double m = 0.5 * (s.a + s.b);
      work.push_back({s.a, m, s.depth + 1});
      work.push_back({m, s.b, s.depth + 1});
    } else {
      total += d;
    }
  }
  return to_integer_winding(total, 1e-6);
}

// ---------------------------------------------------------------------------
// locate_zeros: quadtree over rectangles

namespace {

struct EdgeSuspect {};  // zero too close to a box boundary: re-split elsewhere

class Locator {
 public:
  Locator(const std::function<DetSample(cplx)>& fn, double diam_tol, long budget,
          double min_spacing)
      : fn_(fn), tol_(diam_tol), budget_(budget), spacing_(min_spacing) {}

  std::vector<Zero> run(const Rect& region) {
    try {
      return solve(region);
    } catch (const EdgeSuspect&) {
      throw error("locate_zeros: zero suspected on the region boundary, perturb the region");
    }
  }

 private:
  DetSample eval(cplx z) {
    if (--budget_ < 0) throw error("locate_zeros: evaluation budget exhausted, boxes unresolved");
    DetSample s = fn_(z);
    if (s.on_zero || !std::isfinite(s.log_modulus)) throw EdgeSuspect{};
    return s;
  }

  // Unwrapped phase increment along the straight segment [a, b]. The initial
  // sampling step is capped at spacing_; the pi/2 test below only detects
  // aliasing, it cannot recover a full turn lost inside one coarse segment.
  double edge_phase(cplx a, cplx b) {
    struct Seg {
      cplx a, b;
      double pa, pb;
      int depth;
    };
    std::deque<Seg> work;
    const int n0 = std::min<long>(8192, 1 + static_cast<long>(std::abs(b - a) / spacing_));
    cplx prev = a;
    double pprev = eval(a).phase;
    for (int k = 1; k <= n0; ++k) {
      const cplx node = a + (b - a) * (static_cast<double>(k) / n0);
      const double pnode = eval(node).phase;
      work.push_back({prev, node, pprev, pnode, 0});
      prev = node;
      pprev = pnode;
    }
    double total = 0.0;
    while (!work.empty()) {
      const Seg s = work.front();
      work.pop_front();
      const double d = wrap_pm_pi(s.pb - s.pa);
      if (std::abs(d) > pi / 2.0) {
        if (s.depth >= 30) throw EdgeSuspect{};
        const cplx m = 0.5 * (s.a + s.b);
        const double pm = eval(m).phase;
        work.push_back({s.a, m, s.pa, pm, s.depth + 1});
        work.push_back({m, s.b, pm, s.pb, s.depth + 1});
      } else {
        total += d;
      }
    }
    return total;
  }

  int box_winding(const Rect& b) {
    const cplx c00(b.re_lo, b.im_lo), c10(b.re_hi, b.im_lo);
    const cplx c11(b.re_hi, b.im_hi), c01(b.re_lo, b.im_hi);
    const double total =
        edge_phase(c00, c10) + edge_phase(c10, c11) + edge_phase(c11, c01) + edge_phase(c01, c00);
    return to_integer_winding(total, 1e-3);
  }

  Zero polish(const Rect& b, int mult) {
    cplx z(0.5 * (b.re_lo + b.re_hi), 0.5 * (b.im_lo + b.im_hi));
    const double h = 0.25 * std::max(b.re_hi - b.re_lo, b.im_hi - b.im_lo);
    for (int it = 0; it < 40; ++it) {
      DetSample p = fn_(z + h), m = fn_(z - h);
      DetSample pi_ = fn_(z + iu * h), mi = fn_(z - iu * h);
      if (!std::isfinite(p.log_modulus) || !std::isfinite(m.log_modulus) ||
          !std::isfinite(pi_.log_modulus) || !std::isfinite(mi.log_modulus))
        break;
      // dlog f via central differences in two directions, averaged
      const cplx gx((p.log_modulus - m.log_modulus) / (2 * h),
                    wrap_pm_pi(p.phase - m.phase) / (2 * h));
      const cplx gy((pi_.log_modulus - mi.log_modulus) / (2 * h),
                    wrap_pm_pi(pi_.phase - mi.phase) / (2 * h));
      const cplx g = 0.5 * (gx + (gy / iu));
      if (std::abs(g) == 0.0) break;
      const cplx step = -static_cast<double>(mult) / g;
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) break;
      if (std::abs(step) > 4 * h) break;  // derivative unreliable, keep center
      z += step;
      if (std::abs(step) < 1e-13 * (1.0 + std::abs(z))) break;
    }
    return Zero{z, mult};
  }

  std::vector<Zero> solve(const Rect& b) {
    const int w = box_winding(b);
    if (w == 0) return {};
    const double diam = std::hypot(b.re_hi - b.re_lo, b.im_hi - b.im_lo);
    if (diam < tol_) return {polish(b, w)};
    // jittered splits dodge zeros sitting on a cut line
    static const double off[6] = {0.0, 0.031, -0.047, 0.083, -0.101, 0.137};
    for (double o : off) {
      const double fx = b.re_lo + (0.5 + o) * (b.re_hi - b.re_lo);
      const double fy = b.im_lo + (0.5 + o) * (b.im_hi - b.im_lo);
      const Rect kids[4] = {{b.re_lo, fx, b.im_lo, fy},
                            {fx, b.re_hi, b.im_lo, fy},
                            {b.re_lo, fx, fy, b.im_hi},
                            {fx, b.re_hi, fy, b.im_hi}};
      try {
        std::vector<Zero> out;
        for (const Rect& kid : kids) {
          std::vector<Zero> part = solve(kid);
          out.insert(out.end(), part.begin(), part.end());
        }
        return out;
      } catch (const EdgeSuspect&) {
        continue;  // try the next split offset
      }
    }
    throw error("locate_zeros: could not split a box away from its zeros");
  }

  const std::function<DetSample(cplx)>& fn_;
  double tol_;
  long budget_;
  double spacing_;
};

}  // namespace

std::vector<Zero> locate_zeros(const std::function<DetSample(cplx)>& fn, const Rect& region,
                               double diam_tol, long budget, double min_spacing) {
  if (region.re_hi <= region.re_lo || region.im_hi <= region.im_lo)
    throw error("locate_zeros: empty region");
  if (!(min_spacing > 0)) throw error("locate_zeros: min_spacing must be > 0");
  std::vector<Zero> out = Locator(fn, diam_tol, budget, min_spacing).run(region);
  std::sort(out.begin(), out.end(), [](const Zero& a, const Zero& b) {
    return std::abs(a.location) < std::abs(b.location);
  });
  return out;
}

std::vector<Zero> locate_zeros(const Potential& V, std::shared_ptr<const SpaceGrid> grid,
                               const Rect& region, int alpha, double diam_tol) {
  const double gmax = continuation_gamma_max(V);
  if (!(region.im_lo > -gmax))
    throw error("locate_zeros: region leaves the continuation domain im lambda > -gamma");
  auto fn = [&](cplx lam) { return eval_det(assemble_bs(V, grid, lam), alpha); };
  return locate_zeros(fn, region, diam_tol);
}

double regularized_count(const std::vector<Zero>& zeros, double r) {
  if (r <= 0.0) throw error("regularized_count: r must be > 0");
  double acc = 0.0;
  for (const Zero& z : zeros) {
    const double a = std::abs(z.location);
    if (a == 0.0) throw error("regularized_count: zero at the origin, integral diverges");
    if (a <= r) acc += z.multiplicity * std::log(r / a);
  }
  return acc;
}

double jensen_residual(const std::function<cplx(cplx)>& f, const std::vector<Zero>& zeros,
                       double r) {
  if (std::abs(f(cplx{0, 0}) - 1.0) > 1e-8) throw error("jensen_residual: f(0) must be 1");
  const int n = 4096;
  double mean = 0.0;
  for (int k = 0; k < n; ++k) {
    const double a = std::abs(f(r * std::exp(iu * (2.0 * pi * k / n))));
    if (a == 0.0) throw error("jensen_residual: f vanishes on the circle");
    mean += std::log(a);
  }
  mean /= n;
  return std::abs(mean - regularized_count(zeros, r));
}

DiskGeometry shifted_disk_geometry(const ShiftedDisk& disk) {
  const double l0 = std::abs(disk.lambda0);
  if (disk.lambda0.imag() <= 0.0 || std::abs(disk.lambda0.real()) > 1e-12 * (1.0 + l0))
    throw error("shifted_disk_geometry: lambda0 must lie on the positive imaginary axis");
  if (disk.r <= 0.0) throw error("shifted_disk_geometry: r must be > 0");
  return {-disk.r, std::sqrt(2.0 * l0 * disk.r + disk.r * disk.r), disk.r};
}

ShiftedDisk make_shifted_disk(double A, double v0, double r) {
  ShiftedDisk d;
  d.A = A;
  d.r = r;
  d.lambda0 = iu * (A / 2.0) * v0 * v0;
  return d;
}

double a0_calibrated() {
  // Smallest A on a 0.05 grid keeping -ln(1 - s_1(BS(i A v0^2 / 2))^4) <= 1/2
  // across the reference family {R in {1,2}} x {h in {-10, 10i, -1}};
  // produced by tools/gen_reference.py --a0-sweep.
  return 0.45;
}

double default_A(double r, double v0) {
  if (r <= 0.0 || v0 <= 0.0) throw error("default_A: r and v0 must be > 0");
  return std::max(a0_calibrated(), r / (v0 * v0));
}

// ---------------------------------------------------------------------------
// count_in_disk

namespace {

// Phase of V on its support when constant (relative spread below 1e-9).
std::optional<double> uniform_phase(const Potential& V,
                                    const std::shared_ptr<const SpaceGrid>& grid) {
  cplx dir{0, 0};
  std::vector<cplx> vals;
  for (const auto& x : grid->nodes) {
    const cplx v = eval_potential(V, x);
    if (std::abs(v) == 0.0) continue;
    vals.push_back(v / std::abs(v));
    dir += vals.back();
  }
  if (vals.empty() || std::abs(dir) == 0.0) return std::nullopt;
  dir /= std::abs(dir);
  for (cplx u : vals)
    if (std::abs(u - dir) > 1e-9) return std::nullopt;
  return std::arg(dir);
}

Potential abs_potential(const Potential& V) {
  Potential out = V;
  std::visit(
      [](auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, BallIndicator> || std::is_same_v<T, TubeIndicator>) {
          v.h = std::abs(v.h);
        } else if constexpr (std::is_same_v<T, RadialTable>) {
          for (auto& x : v.values) x = std::abs(x);
        } else if constexpr (std::is_same_v<T, SparseSum>) {
          for (auto& b : v.bumps) b.h = std::abs(b.h);
        } else if constexpr (std::is_same_v<T, ExpProfile>) {
          // profile is already real nonnegative
        } else if constexpr (std::is_same_v<T, GridSampled>) {
          for (auto& x : v.values) x = std::abs(x);
        }
      },
      out.v);
  return out;
}

struct NodeEigs {
  std::vector<cplx> mu;
  double s1 = 0.0;
};

struct ZeroOnContour {};

struct ChannelVal {
  double lm = 0.0;   // log |det factor product|
  double arg = 0.0;  // its principal argument
};

// log det(I - T/omega) from the eigenvalues of T (unit |omega|).
ChannelVal ray_channel(const NodeEigs& e, cplx omega) {
  ChannelVal out;
  cplx dir{1, 0};
  for (cplx mu : e.mu) {
    const cplx f = 1.0 - mu / omega;
    const double a = std::abs(f);
    if (a < 1e-12 * (1.0 + std::abs(mu))) throw ZeroOnContour{};
    out.lm += std::log(a);
    dir *= f / a;
  }
  out.arg = std::arg(dir);
  return out;
}

// log det(I - (-T)^alpha) for the raw determinant channel.
ChannelVal raw_channel(const NodeEigs& e, int alpha) {
  ChannelVal out;
  cplx dir{1, 0};
  for (cplx mu : e.mu) {
    const cplx f = 1.0 - std::pow(-mu, alpha);
    const double a = std::abs(f);
    if (a < 1e-12 * (1.0 + std::pow(std::abs(mu), alpha))) throw ZeroOnContour{};
    out.lm += std::log(a);
    dir *= f / a;
  }
  out.arg = std::arg(dir);
  return out;
}

double ray_distance(cplx mu, cplx omega) {  // distance to the half-line through omega
  const double t = std::max(mu.real() * omega.real() + mu.imag() * omega.imag(), 0.0);
  return std::abs(mu - t * omega);
}

struct ContourData {
  std::map<double, NodeEigs> nodes;              // theta -> spectrum
  std::map<double, std::vector<ChannelVal>> ch;  // theta -> per-channel values
};

// Adaptive phase tracking of every channel along theta in [lo, hi].
// Returns per-channel unwrapped increments; trapezoid of lm in increments[1].
struct SweepResult {
  std::vector<double> dphase;   // per channel
  std::vector<double> lm_mean;  // per channel: (1/(hi-lo)) integral of lm
};

class Sweep {
 public:
  Sweep(std::function<NodeEigs(cplx)> eval, std::vector<cplx> rays, int alpha, bool with_raw,
        double radius)
      : eval_(std::move(eval)), rays_(std::move(rays)), alpha_(alpha), with_raw_(with_raw),
        radius_(radius) {}

  int channels() const { return static_cast<int>(rays_.size()) + (with_raw_ ? 1 : 0); }

  SweepResult run(double lo, double hi, int initial, int max_depth) {
    data_.nodes.clear();
    data_.ch.clear();
    struct Seg {
      double a, b;
      int depth;
    };
    std::deque<Seg> work;
    for (int k = 0; k < initial; ++k)
      work.push_back({lo + (hi - lo) * k / initial, lo + (hi - lo) * (k + 1) / initial, 0});
    SweepResult out;
    out.dphase.assign(channels(), 0.0);
    out.lm_mean.assign(channels(), 0.0);
    long evals_left = 4000;
    while (!work.empty()) {
      const Seg s = work.front();
      work.pop_front();
      const auto& ca = at(s.a, evals_left);
      const auto& cb = at(s.b, evals_left);
      bool refine = false;
      for (int c = 0; c < channels() && !refine; ++c)
        if (std::abs(wrap_pm_pi(cb[c].arg - ca[c].arg)) > pi / 2.0) refine = true;
      if (!refine) refine = eig_motion(s.a, s.b);
      if (refine && s.depth < max_depth) {
        const double m = 0.5 * (s.a + s.b);
        work.push_back({s.a, m, s.depth + 1});
        work.push_back({m, s.b, s.depth + 1});
        continue;
      }
      for (int c = 0; c < channels(); ++c) {
        out.dphase[c] += wrap_pm_pi(cb[c].arg - ca[c].arg);
        out.lm_mean[c] += 0.5 * (cb[c].lm + ca[c].lm) * (s.b - s.a);
      }
    }
    for (double& v : out.lm_mean) v /= (hi - lo);
    return out;
  }

 private:
  const std::vector<ChannelVal>& at(double theta, long& evals_left) {
    auto it = data_.ch.find(theta);
    if (it != data_.ch.end()) return it->second;
    if (--evals_left < 0) throw error("count_in_disk: contour evaluation budget exhausted");
    NodeEigs e = eval_(radius_ * std::exp(iu * theta));
    std::vector<ChannelVal> vals;
    for (cplx w : rays_) vals.push_back(ray_channel(e, w));
    if (with_raw_) vals.push_back(raw_channel(e, alpha_));
    data_.nodes.emplace(theta, std::move(e));
    return data_.ch.emplace(theta, std::move(vals)).first->second;
  }

  bool eig_motion(double a, double b) const {
    const NodeEigs& ea = data_.nodes.at(a);
    const NodeEigs& eb = data_.nodes.at(b);
    for (cplx w : rays_) {
      for (cplx mu : ea.mu) {
        const double d = ray_distance(mu, w);
        if (d >= 0.3) continue;
        double nn = HUGE_VAL;
        for (cplx nu : eb.mu) nn = std::min(nn, std::abs(nu - mu));
        // An eigenvalue can only steal a full turn around the ray if it moves
        // on the order of its own distance d to the ray; the 0.05 floor keeps
        // genuine crossings (d -> 0) from demanding ever-finer segments. The
        // crossing's winding itself is resolved by the phase test; this motion
        // test only backs it up against whole-turn aliasing.
        if (nn > std::max(d, 0.05)) return true;
      }
    }
    return false;
  }

  std::function<NodeEigs(cplx)> eval_;
  std::vector<cplx> rays_;
  int alpha_;
  bool with_raw_;
  double radius_;
  ContourData data_;
};

std::string family_label(cplx unit_phase) {
  const double a = std::arg(unit_phase);
  if (std::abs(wrap_pm_pi(a)) < 1e-6) return "+1";
  if (std::abs(wrap_pm_pi(a - pi)) < 1e-6) return "-1";
  if (std::abs(wrap_pm_pi(a - pi / 2)) < 1e-6) return "+i";
  if (std::abs(wrap_pm_pi(a + pi / 2)) < 1e-6) return "-i";
  char buf[48];
  std::snprintf(buf, sizeof(buf), "exp(i %.6g)", a);
  return buf;
}

CountReport count_uniform_phase(const std::function<NodeEigs(cplx)>& eval, double phase,
                                double r, const CountConfig& config) {
  // Rays of the phase-free kernel matrix T (K = e^{i phase/2} T): the family
  // of unit phase u sits on the ray -conj(u); det(I-(-K)^alpha) vanishes on
  // the rays e^{-i phase/2} zeta^{-1} with zeta^alpha = 1.
  std::vector<cplx> rays;
  auto add_ray = [&](cplx w) {
    w /= std::abs(w);
    for (cplx v : rays)
      if (std::abs(v - w) < 1e-9) return;
    rays.push_back(w);
  };
  const cplx omega_star = -std::exp(-iu * phase);
  add_ray(omega_star);
  add_ray(std::conj(omega_star));
  // Every tracked ray is also a refinement driver, so the optional families
  // below cost extra contour evaluations; by default only the potential's own
  // family (the two rays above) is certified.
  std::vector<cplx> det_rays;  // zero rays of det(I-(-K)^alpha): T = -e^{-i phase/2}/zeta
  if (config.families) {
    for (int k = 0; k < 4; ++k) add_ray(std::pow(iu, k));  // canonical families
    for (int k = 0; k < config.alpha; ++k) {
      const cplx zeta = std::exp(iu * (2.0 * pi * k / config.alpha));
      const cplx w = -std::exp(-iu * phase / 2.0) / zeta;
      det_rays.push_back(w / std::abs(w));
      add_ray(det_rays.back());
      add_ray(std::conj(det_rays.back()));
    }
  }

  Sweep sweep(eval, rays, config.alpha, false, r);
  // T(-conj(lambda)) = conj(T(lambda)): the winding over the full circle is
  // the sum of the half-arc increments at omega and at conj(omega).
  const SweepResult half = sweep.run(-pi / 2.0, pi / 2.0, 128, 12);
  auto index_of = [&](cplx w) {
    for (size_t i = 0; i < rays.size(); ++i)
      if (std::abs(rays[i] - w / std::abs(w)) < 1e-9) return static_cast<int>(i);
    throw error("count_in_disk: ray lookup failed");
  };
  auto winding_at = [&](cplx w) {
    const double total = half.dphase[index_of(w)] + half.dphase[index_of(std::conj(w))];
    return to_integer_winding(total, 0.02);
  };

  CountReport rep;
  rep.r = r;
  rep.n = winding_at(omega_star);
  if (config.families) {
    for (int k = 0; k < 4; ++k) {
      const cplx w = std::pow(iu, k);
      rep.family_counts[family_label(-std::conj(w))] = winding_at(w);
    }
    int raw = 0;
    for (cplx w : det_rays) raw += winding_at(w);
    rep.raw_winding = raw;
  }

  // Jensen estimate of the regularized count for f = det(I - T/omega*):
  // circle mean of ln|f| minus ln|f(0)|.
  const int c_star = index_of(omega_star);
  const int c_conj = index_of(std::conj(omega_star));
  const double circle_mean = 0.5 * (half.lm_mean[c_star] + half.lm_mean[c_conj]);
  const NodeEigs at0 = eval(cplx{0, 0});
  const ChannelVal f0 = ray_channel(at0, omega_star);
  rep.N = circle_mean - f0.lm;
  return rep;
}

CountReport count_raw(const std::function<NodeEigs(cplx)>& eval, double r,
                      const CountConfig& config) {
  Sweep sweep(eval, {}, config.alpha, true, r);
  const SweepResult full = sweep.run(0.0, 2.0 * pi, 192, 12);
  CountReport rep;
  rep.r = r;
  rep.raw_winding = to_integer_winding(full.dphase[0], 0.02);
  rep.n = *rep.raw_winding;
  const NodeEigs at0 = eval(cplx{0, 0});
  rep.N = full.lm_mean[0] - raw_channel(at0, config.alpha).lm;
  return rep;
}

void attach_ball_oracle(CountReport& rep, const BallIndicator& ball, double r) {
  const double pad = 0.05 * r;
  Rect box{-r - pad, r + pad, -r - pad, r + pad};
  const std::vector<RadialMode> modes = oracle_3d_radial(ball.h, ball.R, -1, box);
  rep.oracle_n = radial_total(modes, r);
  rep.zeros.clear();
  int nplus = 0;
  for (const RadialMode& m : modes)
    for (cplx root : m.roots) {
      if (std::abs(root) > r) continue;
      rep.zeros.push_back(Zero{root, 2 * m.ell + 1});
      if (root.imag() >= 0.0) nplus += 2 * m.ell + 1;
    }
  std::sort(rep.zeros.begin(), rep.zeros.end(), [](const Zero& a, const Zero& b) {
    return std::abs(a.location) < std::abs(b.location);
  });
  rep.zeros_from_oracle = true;
  rep.n_plus = nplus;
  rep.N = regularized_count(rep.zeros, r);
}

CountReport count_once(const Potential& V, std::shared_ptr<const SpaceGrid> explicit_grid,
                       double r, const CountConfig& config) {
  const double gmax = continuation_gamma_max(V);
  if (!(r < gmax)) throw error("count_in_disk: disk leaves the continuation domain");

  const auto* ball = std::get_if<BallIndicator>(&V.v);
  const bool corrected = !explicit_grid && ball != nullptr;

  std::shared_ptr<const SpaceGrid> grid = explicit_grid;
  std::shared_ptr<const BallGrid> bgrid;
  std::shared_ptr<const CorrectionTable> table;
  if (corrected) {
    bgrid = std::make_shared<BallGrid>(ball_grid_for(config.target_n, ball->R));
    table = build_correction(*bgrid);
    grid = bgrid->grid;
  } else if (!grid) {
    grid = default_grid(V, config.target_n);
  }

  const std::optional<double> phase = uniform_phase(V, grid);
  const Potential Vasm = phase ? abs_potential(V) : V;
  const std::shared_ptr<const StaticKernel> pre =
      corrected ? build_static_kernel(*bgrid, table) : build_static_kernel(grid);

  long n_evals = 0;
  double t_asm = 0.0, t_eig = 0.0;
  auto eigs_of = [&](const Eigen::MatrixXcd& M) {
    NodeEigs e;
    const int n = static_cast<int>(M.rows());
    const Eigen::VectorXcd ev = (config.compress_rank > 0 && config.compress_rank < n)
                                    ? eigenvalues_compressed(M, config.compress_rank, config.seed)
                                    : eigenvalues_dense(M);
    e.mu.assign(ev.data(), ev.data() + ev.size());
    for (cplx mu : e.mu) e.s1 = std::max(e.s1, std::abs(mu));
    std::vector<cplx> kept;
    for (cplx mu : e.mu)
      if (std::abs(mu) > 1e-6 * e.s1) kept.push_back(mu);
    e.mu = std::move(kept);
    return e;
  };
  std::function<NodeEigs(cplx)> eval = [&](cplx lam) {
    ++n_evals;
    const auto t0 = std::chrono::steady_clock::now();
    const BSMatrix M = corrected ? assemble_bs_corrected(Vasm, *bgrid, table, pre, lam)
                                 : assemble_bs(Vasm, grid, pre, lam);
    const auto t1 = std::chrono::steady_clock::now();
    NodeEigs e = eigs_of(M.entries);
    const auto t2 = std::chrono::steady_clock::now();
    t_asm += std::chrono::duration<double>(t1 - t0).count();
    t_eig += std::chrono::duration<double>(t2 - t1).count();
    return e;
  };

  CountReport rep = phase ? count_uniform_phase(eval, *phase, r, config)
                          : count_raw(eval, r, config);
  if (std::getenv("RESCOUNT_PROFILE"))
    std::fprintf(stderr, "count profile: %ld contour evals, %.1f s assembly, %.1f s spectra\n",
                 n_evals, t_asm, t_eig);

  if (config.attach_oracle && ball) attach_ball_oracle(rep, *ball, r);
  if (config.locate) {
    auto fn = [&](cplx lam) {
      const BSMatrix M = corrected ? assemble_bs_corrected(V, *bgrid, table, pre, lam)
                                   : assemble_bs(V, grid, pre, lam);
      return eval_det(M, config.alpha);
    };
    rep.zeros = locate_zeros(fn, Rect{-r, r, -r, r});
    rep.zeros_from_oracle = false;
    int nplus = 0;
    for (const Zero& z : rep.zeros)
      if (z.location.imag() >= 0.0) nplus += z.multiplicity;
    rep.n_plus = nplus;
  }
  return rep;
}

}  // namespace

CountReport count_in_disk(const Potential& V, double r, const CountConfig& config) {
  return count_in_disk(V, nullptr, r, config);
}

CountReport count_in_disk(const Potential& V, std::shared_ptr<const SpaceGrid> grid, double r,
                          const CountConfig& config) {
  validate(V);
  if (V.dim != 3) throw error("count_in_disk: matrix counting is dim 3 only");
  if (r <= 0.0) throw error("count_in_disk: r must be > 0");
  // zeros within the truncation tail of the contour are undecidable: perturb
  // the radius by 1% and re-count
  for (double radius : {r, 1.01 * r, 0.99 * r}) {
    try {
      return count_once(V, grid, radius, config);
    } catch (const ZeroOnContour&) {
      continue;
    }
  }
  throw error("count_in_disk: determinant vanishes on every perturbed contour");
}

}  // namespace rescount
