#include "rescount/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

namespace rescount {
namespace {

// Normalized interior radial waves m_l(w) := (2l+1)!! j_l(z) / z^l as a
// function of w = z^2. Entire and even in z, so no square-root branch enters;
// m_l(0) = 1 and |m_l| stays O(e^{|Im z|}) for every order, which keeps the
// whole computation inside double range even at high l where j_l itself
// underflows. Dividing the three-term recurrence by the factorial scale gives
//   m_{k-1} = m_k - w m_{k+1} / ((2k+1)(2k+3)),
// run downward from well above max(lmax, |z|) (the minimal solution dominates
// downward, Miller's method), then rescaled against the exact
//   m_0 = sin z / z   or   m_1 = 3 (sin z - z cos z) / z^3,
// whichever is larger in modulus so a zero of sin never poisons the scale.
std::vector<cplx> interior_waves(int lmax, cplx w) {
  double az = std::sqrt(std::abs(w));
  int start = lmax + 32 + static_cast<int>(std::ceil(az));
  std::vector<cplx> m(start + 2);
  m[start + 1] = 0.0;
  m[start] = 1.0;
  for (int k = start; k >= 1; --k) {
    m[k - 1] = m[k] - w * m[k + 1] / ((2.0 * k + 1.0) * (2.0 * k + 3.0));
    if (std::abs(m[k - 1]) > 1e250)
      for (int j = k - 1; j <= start + 1; ++j) m[j] *= 1e-250;
  }
  cplx m0t, m1t;
  if (std::abs(w) < 1e-2) {  // series sidesteps the sin z - z cos z cancellation
    m0t = 1.0 - w / 6.0 + w * w / 120.0 - w * w * w / 5040.0;
    m1t = 1.0 - w / 10.0 + w * w / 280.0 - w * w * w / 15120.0;
  } else {
    cplx z = std::sqrt(w);  // either branch; everything below is even in z
    cplx s = std::sin(z), c = std::cos(z);
    m0t = s / z;
    m1t = 3.0 * (s - z * c) / (w * z);
  }
  cplx scale = std::abs(m0t) >= std::abs(m1t) ? m0t / m[0] : m1t / m[1];
  if (!std::isfinite(std::abs(scale))) throw error("interior_waves: normalization failed");
  m.resize(lmax + 1);
  for (cplx& v : m) v *= scale;
  return m;
}

// Normalized outgoing radial waves qhat_l(z) := Q_l(z) / (2l-1)!! where Q_l is
// the monic polynomial in h_l(z) = (-i)^{l+1} e^{iz} Q_l(z) / z^{l+1}. Upward
// recurrence (the dominant direction for the outgoing solution):
//   qhat_{k+1} = i qhat_k + z^2 qhat_{k-1} / ((2k+1)(2k-1)),
// qhat_0 = 1, qhat_1 = z + i. Magnitudes peak around e^{|z|/2}, fine in double
// up to |z| ~ 10^3; beyond that fail loudly rather than rescale, because a
// lambda-dependent rescale would corrupt windings.
std::vector<cplx> outgoing_waves(int lmax, cplx z) {
  std::vector<cplx> q(std::max(lmax + 1, 2));
  q[0] = 1.0;
  q[1] = z + iu;
  cplx z2 = z * z;
  for (int k = 1; k < lmax; ++k) {
    q[k + 1] = iu * q[k] + z2 * q[k - 1] / ((2.0 * k + 1.0) * (2.0 * k - 1.0));
    if (!std::isfinite(std::abs(q[k + 1])))
      throw error("outgoing_waves: overflow, |lambda R| too large for order " +
                  std::to_string(k + 1));
  }
  q.resize(std::max(lmax + 1, 2));
  return q;
}

DetSample scalar_sample(cplx lambda, cplx v) {
  DetSample s;
  s.lambda = lambda;
  s.tail_estimate = 0;
  double av = std::abs(v);
  if (av == 0.0 || !std::isfinite(av)) {
    s.on_zero = true;
    s.log_modulus = -1e300;
    s.phase = 0;
  } else {
    s.log_modulus = std::log(av);
    s.phase = std::arg(v);
  }
  return s;
}

// Schroeder iteration z -> z - mult * f / f' (quadratic at a root of known
// multiplicity), with the derivative from central differences of f itself.
// The quadtree hands us a ~diam_tol-accurate start; this takes it to ~1e-14.
cplx refine_root(const std::function<cplx(cplx)>& f, cplx z, int mult) {
  for (int it = 0; it < 60; ++it) {
    cplx v = f(z);
    if (std::abs(v) == 0.0) return z;
    double h = 1e-7 * (1.0 + std::abs(z));
    cplx d = (f(z + h) - f(z - h)) / (2.0 * h);
    if (!(std::abs(d) > 0.0) || !std::isfinite(std::abs(d))) break;
    cplx step = -static_cast<double>(mult) * v / d;
    double cap = 1e-3 * (1.0 + std::abs(z));
    if (std::abs(step) > cap) step *= cap / std::abs(step);
    z += step;
    if (std::abs(step) < 1e-15 * (1.0 + std::abs(z))) break;
  }
  return z;
}

// Certification: the winding of f on the |z - z0| = 1e-4 circle must equal the
// claimed multiplicity, and |f(z0)| must sit below 1e-8 of the circle
// maximum (1e-8 x 1e-4 bounds the position error near 1e-12 while staying
// above the cancellation noise of the wave recurrences). Returns that
// relative residual.
double certify_root(const std::function<cplx(cplx)>& f, cplx z0, int mult, int ell) {
  const double rho = 1e-4;
  const int n = 256;
  std::vector<DetSample> loop;
  loop.reserve(n + 1);
  double vmax = 0;
  for (int k = 0; k < n; ++k) {
    cplx z = z0 + rho * std::exp(iu * (2.0 * pi * k / n));
    cplx v = f(z);
    vmax = std::max(vmax, std::abs(v));
    loop.push_back(scalar_sample(z, v));
  }
  loop.push_back(loop.front());
  char buf[160];
  int w = winding_count(loop);
  if (w != mult) {
    std::snprintf(buf, sizeof buf,
                  "root certification failed at (%.12g, %.12g) ell=%d: circle winding %d, "
                  "located multiplicity %d",
                  z0.real(), z0.imag(), ell, w, mult);
    throw error(buf);
  }
  double residual = std::abs(f(z0)) / vmax;
  if (!(residual < 1e-8)) {
    std::snprintf(buf, sizeof buf,
                  "root certification failed at (%.12g, %.12g) ell=%d: relative residual %.3e",
                  z0.real(), z0.imag(), ell, residual);
    throw error(buf);
  }
  return residual;
}

// Locate, refine, and certify every root of f in the region. Roots are stored
// repeated per multiplicity. ell only labels error messages here; the 2l+1
// angular degeneracy is applied by radial_total, not stored in the root list.
RadialMode solve_mode(const std::function<cplx(cplx)>& f, const Rect& region, int ell, cplx V0,
                      double R) {
  std::vector<Zero> zs;
  try {
    auto det_fn = [&](cplx z) { return scalar_sample(z, f(z)); };
    // Smooth phase rate of the secular functions is at most ~3R+O(1)
    // (interior e^{2i kappa R} plus outgoing e^{i lambda R} factors), so this
    // spacing keeps coarse edge increments well under the aliasing limit.
    zs = locate_zeros(det_fn, region, 1e-5, 50000000, 0.3 / (1.0 + 3.0 * R));
  } catch (const std::exception& e) {
    throw error("mode ell=" + std::to_string(ell) + ": " + e.what());
  }
  RadialMode mode;
  mode.ell = ell;
  mode.V0 = V0;
  mode.R = R;
  for (const Zero& z : zs) {
    cplx root = refine_root(f, z.location, z.multiplicity);
    double res = certify_root(f, root, z.multiplicity, ell);
    for (int k = 0; k < z.multiplicity; ++k) {
      mode.roots.push_back(root);
      mode.residuals.push_back(res);
    }
  }
  return mode;
}

}  // namespace

cplx secular_3d(int ell, cplx V0, double R, cplx lambda) {
  if (ell < 0 || R <= 0) throw error("secular_3d: need ell >= 0 and R > 0");
  cplx w = (lambda * lambda - V0) * (R * R);  // (kappa R)^2, no branch choice
  auto m = interior_waves(ell + 1, w);
  auto q = outgoing_waves(ell + 1, lambda * R);
  // Substituting the normalized waves into S_ell collapses it (the l m_l qhat_l
  // cross terms cancel) to the two-term form below, up to the zero-free factor
  // -(-i)^{ell+1} e^{i lambda R} / R^2 and a positive factorial constant. The
  // normalization keeps both products O(1)-balanced at any order.
  double den = (2.0 * ell + 1.0) * (2.0 * ell + 3.0);
  return iu * m[ell] * q[ell + 1] + w * m[ell + 1] * q[ell] / den;
}

cplx secular_1d(cplx V0, double a, cplx lambda) {
  if (a <= 0) throw error("secular_1d: need a > 0");
  cplx k2 = lambda * lambda - V0;  // kappa^2
  cplx w = k2 * (a * a);
  cplx c, s;  // cos(kappa a) and sin(kappa a)/kappa, both even in kappa
  if (std::abs(w) < 1e-8) {
    c = 1.0 - w / 2.0 + w * w / 24.0;
    s = a * (1.0 - w / 6.0 + w * w / 120.0);
  } else {
    cplx z = std::sqrt(w);  // either branch, evenness
    c = std::cos(z);
    s = a * std::sin(z) / z;
  }
  return (k2 * s + iu * lambda * c) * (c - iu * lambda * s);
}

// Separation certificate: no root of secular_3d with |kappa R| and |lambda R|
// bounded by zmax once the interior log-derivative floor exceeds the exterior
// ceiling. Interior: Re[z j_l'/j_l] >= l - zmax * B_l with B_l >= |j_{l+1}/j_l|
// from the continued-fraction majorant B_k = zmax / (2k+3 - zmax B_{k+1}),
// seeded by the tail bound B_k <= zmax/(2k+3-zmax) valid for 2k+3 > 2 zmax
// (the true ratio tends to z/(2k+3) as k grows). Exterior: from
// h_l(z) = (-i)^{l+1} e^{iz} Q_l(z)/z^{l+1},
//   Re[z h_l'/h_l] = -Im z - (l+1) + Re[z Q_l'/Q_l] <= zmax - (l+1) + l*zmax/(rmin-zmax)
// where rmin = 0.6 (l + 1/2) undercuts the modulus of every zero of Q_l. The
// zero arc of Q_l sits near 0.6627 (l+1/2) (the classical min-modulus curve
// y e^{sqrt(1+y^2)} = 1 + sqrt(1+y^2)); the 0.6 constant is verified by
// companion-matrix rootfinding for l <= 20 and by high-precision contour
// winding for l <= 60 (tools/gen_reference.py hankel-zeros). Orders above 300
// are refused rather than extrapolated further along that curve. A root of
// the secular function off the zeros of j and h forces these log-derivatives
// equal, and on those zeros the factor structure keeps it nonzero, so
// separation excludes roots entirely.
int barrier_ell_max(double zmax) {
  if (!(zmax >= 0)) throw error("barrier_ell_max: need zmax >= 0");
  if (zmax == 0) return 0;
  auto interior_floor = [&](int l) {
    int L0 = l + 40 + static_cast<int>(std::ceil(2.0 * zmax));
    double B = zmax / (2.0 * L0 + 3.0 - zmax);
    for (int k = L0 - 1; k >= l; --k) {
      double den = 2.0 * k + 3.0 - zmax * B;
      if (den <= 0) return -1e300;  // majorant broke down at this order
      B = zmax / den;
    }
    return l - zmax * B;
  };
  auto separated = [&](int l) {
    double rmin = 0.6 * (l + 0.5);
    if (rmin < 2.0 * zmax) return false;  // stay a factor 2 clear of the zero arc
    double ceiling = zmax - (l + 1.0) + l * zmax / (rmin - zmax);
    return interior_floor(l) > ceiling;
  };
  for (int l = 1; l <= 300; ++l) {
    if (!separated(l)) continue;
    bool stable = true;  // cheap monotonicity spot-check above the candidate
    for (int j = 1; j <= 3 && stable; ++j) stable = separated(l + j);
    if (stable) return l;
  }
  throw error(
      "barrier_ell_max: no certified separating order at or below 300 for this "
      "box size; pass an explicit angular cutoff instead");
}

std::vector<RadialMode> oracle_3d_radial(cplx V0, double R, int ell_max, const Rect& region) {
  if (R <= 0) throw error("oracle_3d_radial: need R > 0");
  if (region.re_hi <= region.re_lo || region.im_hi <= region.im_lo)
    throw error("oracle_3d_radial: empty region");
  int top;
  if (ell_max >= 0) {
    top = ell_max;  // explicit cap: search it inclusive
  } else {
    double lam2 = 0;
    for (double re : {region.re_lo, region.re_hi})
      for (double im : {region.im_lo, region.im_hi})
        lam2 = std::max(lam2, re * re + im * im);
    double zmax = std::sqrt(lam2 + std::abs(V0)) * R;  // covers |kappa R| and |lambda R|
    top = barrier_ell_max(zmax) - 1;  // orders >= the barrier are root-free
  }
  std::vector<RadialMode> modes;
  for (int ell = 0; ell <= top; ++ell) {
    auto f = [&, ell](cplx lam) { return secular_3d(ell, V0, R, lam); };
    modes.push_back(solve_mode(f, region, ell, V0, R));
  }
  return modes;
}

std::vector<cplx> oracle_1d_squarewell(cplx V0, double a, const Rect& region) {
  auto f = [&](cplx lam) { return secular_1d(V0, a, lam); };
  RadialMode m = solve_mode(f, region, 0, V0, a);
  std::vector<cplx> out;
  for (cplx root : m.roots) {
    // The parity factorization pins a spurious zero at the origin as V0 -> 0
    // (at V0 = 0 the product collapses to i lambda e^{-2 i lambda a}, whose
    // only zero is lambda = 0 although the free line has no resonance).
    // Dropping |lambda| < 1e-8 removes that artifact; genuinely
    // threshold-tuned wells are outside what this oracle certifies.
    if (std::abs(root) < 1e-8) continue;
    out.push_back(root);
  }
  return out;
}

int radial_total(const std::vector<RadialMode>& modes, double r) {
  int total = 0;
  for (const RadialMode& m : modes)
    for (cplx z : m.roots)
      if (std::abs(z) <= r) total += 2 * m.ell + 1;
  return total;
}

CompareResult compare_counts(int determinant_count, const std::vector<RadialMode>& modes,
                             double r) {
  CompareResult out;
  out.count_a = determinant_count;
  out.count_b = radial_total(modes, r);
  out.match = out.count_a == out.count_b;
  char buf[192];
  std::snprintf(buf, sizeof buf, "determinant count %d vs radial count %d inside |lambda| <= %g",
                out.count_a, out.count_b, r);
  out.diagnostic = buf;
  if (!out.match) {
    for (const RadialMode& m : modes) {
      for (size_t i = 0; i < m.roots.size(); ++i) {
        std::snprintf(buf, sizeof buf,
                      "\n  ell=%d root=(%.12g, %.12g) weight=%d |root|-r=%+.3e residual=%.2e",
                      m.ell, m.roots[i].real(), m.roots[i].imag(), 2 * m.ell + 1,
                      std::abs(m.roots[i]) - r, m.residuals[i]);
        out.diagnostic += buf;
      }
    }
  }
  return out;
}

CompareResult compare_counts(const CountReport& report, const std::vector<RadialMode>& modes) {
  CompareResult out = compare_counts(report.n, modes, report.r);
  if (out.match && report.zeros.empty()) return out;
  // Nearest-neighbor pairing between the determinant-side zero list (if any)
  // and the oracle roots, to make a mismatch actionable.
  std::vector<std::pair<cplx, int>> oracle_zs;
  for (const RadialMode& m : modes)
    for (cplx z : m.roots)
      if (std::abs(z) <= report.r) oracle_zs.emplace_back(z, 2 * m.ell + 1);
  char buf[192];
  for (const Zero& z : report.zeros) {
    double best = 1e300;
    cplx mate = 0;
    for (auto& [oz, wgt] : oracle_zs)
      if (std::abs(z.location - oz) < best) best = std::abs(z.location - oz), mate = oz;
    std::snprintf(buf, sizeof buf,
                  "\n  det zero (%.12g, %.12g) mult=%d -> nearest oracle root (%.12g, %.12g) "
                  "dist=%.3e",
                  z.location.real(), z.location.imag(), z.multiplicity, mate.real(), mate.imag(),
                  oracle_zs.empty() ? -1.0 : best);
    out.diagnostic += buf;
  }
  double edge = 1e300;
  for (auto& [oz, wgt] : oracle_zs) edge = std::min(edge, std::abs(report.r - std::abs(oz)));
  if (!oracle_zs.empty()) {
    std::snprintf(buf, sizeof buf, "\n  nearest oracle root to the contour: %.6e", edge);
    out.diagnostic += buf;
  }
  return out;
}

}  // namespace rescount
