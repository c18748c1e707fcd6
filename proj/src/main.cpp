// rescount CLI: batch front-end over the library. Subcommands assemble the
// kernel matrices, dump spectra and determinant contours, count resonances,
// evaluate bound right-hand sides, run scripted experiment presets, and
// validate hypothesis sets. File outputs go through OutputDir so every run
// leaves a content-hashed manifest; identical inputs and seed give
// bit-identical artifacts.
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rescount/bounds.hpp"
#include "rescount/bs.hpp"
#include "rescount/common.hpp"
#include "rescount/counting.hpp"
#include "rescount/determinant.hpp"
#include "rescount/lapack.hpp"
#include "rescount/oracles.hpp"
#include "rescount/potentials.hpp"
#include "rescount/report.hpp"

namespace rc = rescount;
using nlohmann::json;

namespace {

rc::cplx parse_cplx(const std::string& s) {
  size_t comma = s.find(',');
  try {
    if (comma == std::string::npos) return {std::stod(s), 0.0};
    return {std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))};
  } catch (const std::exception&) {
    throw rc::error("cannot parse complex number from '" + s + "' (expected re or re,im)");
  }
}

std::vector<double> parse_dlist(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    try {
      out.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw rc::error("cannot parse number list '" + s + "'");
    }
  }
  if (out.empty()) throw rc::error("empty number list '" + s + "'");
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw rc::error("cannot open " + path);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

// ---------------------------------------------------------------------------
// Potential construction from flags

struct PotentialFlags {
  std::string text, file;
  std::string ball, tube, exp_profile;
  int dim = 3;
};

void add_potential_flags(CLI::App* cmd, PotentialFlags& pf) {
  cmd->add_option("--potential", pf.text, "potential in the structured-text form");
  cmd->add_option("--potential-file", pf.file, "file holding the structured-text form");
  cmd->add_option("--ball", pf.ball, "ball indicator shorthand: R,h_re[,h_im]");
  cmd->add_option("--tube", pf.tube, "tube indicator shorthand: R,h_re[,h_im]");
  cmd->add_option("--exp-profile", pf.exp_profile, "exp(-c |x|^{1+eps}) shorthand: c,eps");
  cmd->add_option("--dim", pf.dim, "space dimension of the potential (default 3)");
}

rc::Potential potential_from_flags(const PotentialFlags& pf) {
  rc::Potential V;
  V.dim = pf.dim;
  if (!pf.file.empty()) return rc::potential_from_text(read_file(pf.file));
  if (!pf.text.empty()) return rc::potential_from_text(pf.text);
  if (!pf.ball.empty()) {
    auto xs = parse_dlist(pf.ball);
    if (xs.size() < 2 || xs.size() > 3) throw rc::error("--ball wants R,h_re[,h_im]");
    V.v = rc::BallIndicator{xs[0], {xs[1], xs.size() == 3 ? xs[2] : 0.0}};
    return V;
  }
  if (!pf.tube.empty()) {
    auto xs = parse_dlist(pf.tube);
    if (xs.size() < 2 || xs.size() > 3) throw rc::error("--tube wants R,h_re[,h_im]");
    V.v = rc::TubeIndicator{xs[0], {xs[1], xs.size() == 3 ? xs[2] : 0.0}};
    return V;
  }
  if (!pf.exp_profile.empty()) {
    auto xs = parse_dlist(pf.exp_profile);
    if (xs.size() != 2) throw rc::error("--exp-profile wants c,eps");
    V.v = rc::ExpProfile{xs[0], xs[1]};
    return V;
  }
  V.v = rc::BallIndicator{1.0, {1.0, 0.0}};
  return V;
}

// ---------------------------------------------------------------------------
// Bound-parameter flags (names mirror the BoundParams fields) and hypothesis
// checks shared by `validate` and preset refusal.

struct BoundFlags {
  rc::BoundParams bp;
  double rho = 4;
  bool gamma_given = false;
};

void add_bound_flags(CLI::App* cmd, BoundFlags& bf) {
  cmd->add_option("--r", bf.bp.r, "counting radius");
  cmd->add_option("--gamma", bf.bp.gamma, "exponential weight rate")
      ->each([&bf](const std::string&) { bf.gamma_given = true; });
  cmd->add_option("--delta", bf.bp.delta, "in (0,1]");
  cmd->add_option("--eps", bf.bp.eps, "in (0,1]");
  cmd->add_option("--theta", bf.bp.theta, "in (0,1]");
  cmd->add_option("--nu", bf.bp.nu, "> 0");
  cmd->add_option("--kappa", bf.bp.kappa, ">= 0");
  cmd->add_option("--alpha", bf.bp.alpha, "> max((d-1)/nu, d/(2 theta))");
  cmd->add_option("--A", bf.bp.A, "> 0, disk-shift scale");
  cmd->add_option("--R", bf.bp.R, "> 0, support/length scale");
  cmd->add_option("--d", bf.bp.d, "space dimension for the bounds");
  cmd->add_option("--rho", bf.rho, "pointwise-decay power, > max(1+nu+kappa, 2 theta)");
}

struct Hypothesis {
  std::string text;
  bool ok;
};

std::vector<Hypothesis> check_hypotheses(const rc::BoundParams& p, double rho,
                                         const std::optional<rc::PotentialNorms>& norms) {
  std::vector<Hypothesis> out;
  char buf[200];
  auto add = [&](bool ok, const char* fmt, auto... args) {
    std::snprintf(buf, sizeof buf, fmt, args...);
    out.push_back({buf, ok});
  };
  add(p.delta > 0 && p.delta <= 1, "delta in (0,1]: delta = %g", p.delta);
  add(p.eps > 0 && p.eps <= 1, "eps in (0,1]: eps = %g", p.eps);
  add(p.theta > 0 && p.theta <= 1, "theta in (0,1]: theta = %g", p.theta);
  add(p.nu > 0, "nu > 0: nu = %g", p.nu);
  add(p.kappa >= 0, "kappa >= 0: kappa = %g", p.kappa);
  double alpha_floor = std::max((p.d - 1) / p.nu, p.d / (2.0 * p.theta));
  add(p.alpha > alpha_floor, "alpha > max((d-1)/nu, d/(2 theta)) = %g: alpha = %g", alpha_floor,
      p.alpha);
  double rho_floor = std::max(1.0 + p.nu + p.kappa, 2.0 * p.theta);
  add(rho > rho_floor, "rho > max(1+nu+kappa, 2 theta) = %g: rho = %g", rho_floor, rho);
  add(p.gamma > 0, "gamma > 0: gamma = %g", p.gamma);
  add(p.A > 0, "A > 0: A = %g", p.A);
  add(p.r > 0, "r > 0: r = %g", p.r);
  add(p.R > 0, "R > 0: R = %g", p.R);
  double eps_cap = p.gamma / std::sqrt(1.0 + p.delta);
  add(p.eps <= eps_cap, "eps <= gamma/sqrt(1+delta) = %g: eps = %g", eps_cap, p.eps);
  if (norms) {
    double lhs = std::sqrt(1.0 + p.delta) * p.r +
                 p.eps * std::sqrt(p.A * std::pow(norms->v0, (p.d + 1) / 2.0) * p.r + p.r * p.r);
    add(lhs <= p.gamma, "(1+delta)^{1/2} r + eps (A v0^{(d+1)/2} r + r^2)^{1/2} <= gamma: %g vs %g",
        lhs, p.gamma);
  }
  return out;
}

// Presets pick gamma themselves unless the user pins it: the smallest weight
// rate making the disk admissibility hold at the largest swept radius, with a
// 5% margin (a larger gamma only strengthens the weighted norms it feeds).
double auto_gamma(const rc::BoundParams& p, double v0, double r_max) {
  double lhs = std::sqrt(1.0 + p.delta) * r_max +
               p.eps * std::sqrt(p.A * std::pow(v0, (p.d + 1) / 2.0) * r_max + r_max * r_max);
  return 1.05 * lhs;
}

// ---------------------------------------------------------------------------
// Artifact sink: either an OutputDir (with manifest) or stdout.

struct Sink {
  std::optional<rc::OutputDir> dir;
  void emit(const std::string& rel, const std::string& content) {
    if (dir) {
      dir->write(rel, content);
    } else {
      std::cout << "=== " << rel << " ===\n" << content;
      if (!content.empty() && content.back() != '\n') std::cout << '\n';
    }
  }
  void finish() {
    if (dir) dir->finalize();
  }
};

json report_json(const rc::CountReport& rep) {
  json j;
  j["schema"] = "rescount-count-1";
  j["r"] = rep.r;
  j["n"] = rep.n;
  j["N"] = rep.N;
  if (rep.n_plus) j["n_plus"] = *rep.n_plus;
  if (rep.raw_winding) j["raw_winding"] = *rep.raw_winding;
  j["zeros_from_oracle"] = rep.zeros_from_oracle;
  if (rep.oracle_n) j["oracle_n"] = *rep.oracle_n;
  json zs = json::array();
  for (const rc::Zero& z : rep.zeros)
    zs.push_back({{"re", z.location.real()}, {"im", z.location.imag()}, {"mult", z.multiplicity}});
  j["zeros"] = zs;
  if (!rep.family_counts.empty()) j["family_counts"] = rep.family_counts;
  j["bounds"] = rep.bound_values;
  j["verdicts"] = rep.verdicts;
  return j;
}

std::string norms_csv(const rc::PotentialNorms& n) {
  rc::CsvWriter csv({"quantity", "value"});
  auto row = [&](const char* k, double v) { csv.row({k, rc::fmt_double(v)}); };
  row("v0", n.v0);
  row("v_gamma", n.v_gamma);
  row("v_rhoR", n.v_rhoR);
  row("v_rhoRgamma", n.v_rhoRgamma);
  row("sup_norm", n.sup_norm);
  row("gamma", n.gamma);
  row("rho", n.rho);
  row("R", n.R);
  row("dim", n.dim);
  return csv.text();
}

std::string spectrum_csv(const rc::SingularSpectrum& s) {
  rc::CsvWriter csv({"k", "s_k"});
  for (size_t k = 0; k < s.values.size(); ++k)
    csv.row_numeric({static_cast<double>(k + 1), s.values[k]});
  return csv.text();
}

std::string det_csv(const std::vector<rc::DetSample>& samples) {
  rc::CsvWriter csv({"lambda_re", "lambda_im", "log_modulus", "phase", "tail_estimate", "on_zero",
                     "tail_ok"});
  for (const rc::DetSample& s : samples)
    csv.row_numeric({s.lambda.real(), s.lambda.imag(), s.log_modulus, s.phase, s.tail_estimate,
                     s.on_zero ? 1.0 : 0.0, s.tail_ok ? 1.0 : 0.0});
  return csv.text();
}

std::string oracle_csv(const std::vector<rc::RadialMode>& modes) {
  rc::CsvWriter csv({"ell", "lambda_re", "lambda_im", "residual"});
  for (const rc::RadialMode& m : modes)
    for (size_t i = 0; i < m.roots.size(); ++i)
      csv.row_numeric({static_cast<double>(m.ell), m.roots[i].real(), m.roots[i].imag(),
                       m.residuals[i]});
  return csv.text();
}

// One row of every bound evaluator at the given parameters.
void bounds_row(rc::CsvWriter& csv, const rc::BoundParams& p, double rho,
                const rc::PotentialNorms& norms) {
  rc::RhsResult lp = rc::thm_Lp_rhs(p, norms);
  double hp_rhs = std::nan(""), hp_end = std::nan(""), hp_im = std::nan("");
  double hp_ok = 0;
  try {
    rc::HalfplaneRhs hp = rc::thm_halfplane_rhs(p, norms);
    hp_rhs = hp.rhs;
    hp_end = hp.rhs_endpoint;
    hp_im = hp.boundary_im;
    hp_ok = 1;
  } catch (const rc::error&) {
  }
  rc::EigenvalueRhs ev = rc::thm_eigenvalue_rhs(p.gamma, norms, p.d);
  rc::ThreeTerms ct = rc::thm_compact_terms(p, norms.sup_norm, p.R);
  rc::ThreeTerms pt = rc::thm_pointwise_terms(p, norms, rho);
  csv.row_numeric({p.gamma, p.delta, p.eps, p.theta, p.nu, p.kappa, p.alpha, p.A, p.r, p.R, rho,
                   norms.v0, norms.v_gamma, norms.sup_norm,
                   lp.rhs, lp.admissible ? 1.0 : 0.0,
                   hp_rhs, hp_end, hp_im, hp_ok,
                   ev.rhs, ev.smallness ? 1.0 : 0.0,
                   ct.I, ct.II, ct.III, ct.sum, ct.admissible ? 1.0 : 0.0,
                   pt.sum, pt.admissible ? 1.0 : 0.0});
}

std::vector<std::string> bounds_header() {
  return {"gamma", "delta", "eps", "theta", "nu", "kappa", "alpha", "A", "r", "R", "rho",
          "v0", "v_gamma", "sup_norm",
          "lp_rhs", "lp_admissible",
          "halfplane_rhs", "halfplane_endpoint", "halfplane_boundary_im", "halfplane_admissible",
          "eigenvalue_rhs", "eigenvalue_smallness",
          "compact_I", "compact_II", "compact_III", "compact_sum", "compact_admissible",
          "pointwise_sum", "pointwise_admissible"};
}

// Attach bound right-hand sides and verdicts (count <= C_cal * rhs) to a
// count report. Only admissible evaluations become verdicts.
void attach_bounds(rc::CountReport& rep, const rc::Potential& V, rc::BoundParams p, double rho,
                   double cal_C) {
  p.r = rep.r;
  rc::PotentialNorms norms = rc::compute_norms(V, p.gamma, rho, p.R);
  rc::RhsResult lp = rc::thm_Lp_rhs(p, norms);
  if (lp.admissible) rep.bound_values["thm_Lp"] = lp.rhs;
  try {
    rep.bound_values["thm_halfplane"] = rc::thm_halfplane_rhs(p, norms).rhs;
  } catch (const rc::error&) {
  }
  rep.bound_values["thm_eigenvalue"] = rc::thm_eigenvalue_rhs(p.gamma, norms, p.d).rhs;
  rc::Calibration cal;
  for (const auto& [k, v] : rep.bound_values) cal.C[k] = cal_C;
  for (const auto& [k, ok] : rc::verdict(rep.bound_values, rep.n, cal)) rep.verdicts[k] = ok;
}

// ---------------------------------------------------------------------------
// Shared pipeline stages

struct StageLog {
  std::string log;
  std::vector<std::string> failures;
  template <class F>
  void run(const std::string& name, F&& fn) {
    try {
      fn();
      log += "ok      " + name + "\n";
    } catch (const std::exception& e) {
      log += "FAILED  " + name + ": " + e.what() + "\n";
      failures.push_back(name + ": " + e.what());
    }
  }
};

struct CountRow {
  double r;
  rc::CountReport rep;
};

std::string counts_csv(const std::vector<CountRow>& rows) {
  rc::CsvWriter csv({"r", "n", "N", "raw_winding", "ln_r", "ln_n"});
  for (const CountRow& c : rows)
    csv.row_numeric({c.r, static_cast<double>(c.rep.n), c.rep.N,
                     c.rep.raw_winding ? static_cast<double>(*c.rep.raw_winding) : std::nan(""),
                     std::log(c.r),
                     c.rep.n > 0 ? std::log(static_cast<double>(c.rep.n)) : std::nan("")});
  return csv.text();
}

// UHP root table for V = i 1_{B(0,R)}. The numerical range confines the
// eigenvalues z = lambda^2 to {Re z >= 0, 0 < Im z <= 1}, i.e. lambda to
// {re >= im, 0 < im <= 1/sqrt(2)}; the search box is a superset of that
// sliver out to min(1.1 v0^2, cap). Retries with a perturbed box when a root
// sits on the box boundary.
struct UhpRow {
  double R, v0sq;
  int n_plus;
  double max_abs;
};

UhpRow uhp_ball_row(double R, double cap) {
  rc::Potential V;
  V.v = rc::BallIndicator{R, rc::iu};
  double v0sq = rc::sqr(rc::lp_norm(V, 2.0));
  UhpRow row{R, v0sq, 0, 0.0};
  double re_hi = std::min(1.1 * v0sq, cap);
  for (int attempt = 0;; ++attempt) {
    try {
      rc::Rect box{0.0, re_hi, 1e-6 / (attempt + 1.0), 0.75};
      auto modes = rc::oracle_3d_radial(rc::iu, R, -1, box);
      for (const rc::RadialMode& m : modes)
        for (rc::cplx z : m.roots) {
          row.n_plus += 2 * m.ell + 1;
          row.max_abs = std::max(row.max_abs, std::abs(z));
        }
      return row;
    } catch (const rc::error&) {
      if (attempt >= 2) throw;
      re_hi *= 1.013;  // nudge the box off a suspected boundary zero
    }
  }
}

// ---------------------------------------------------------------------------
// Subcommand options

struct CommonRun {
  PotentialFlags pf;
  std::string out;
  int grid_n = 2000;
  int compress_rank = 256;
  uint64_t seed = 20260815;
};

int all_verdicts_exit(const std::vector<CountRow>& rows) {
  for (const CountRow& c : rows)
    for (const auto& [k, ok] : c.rep.verdicts)
      if (!ok) return 1;
  return 0;
}

// ---------------------------------------------------------------------------
// Presets

struct PresetOpts {
  std::string id = "custom";
  CommonRun run;
  BoundFlags bf;
  double cal_C = 10.0;
  std::string sweep_r;  // override of the counting radii
  bool locate = false;
  bool oracle = false;
};

rc::CountConfig preset_config(const PresetOpts& po) {
  rc::CountConfig cfg;
  cfg.target_n = po.run.grid_n;
  cfg.compress_rank = po.run.compress_rank;
  cfg.seed = po.run.seed;
  cfg.locate = po.locate;
  cfg.attach_oracle = po.oracle;
  return cfg;
}

// Resolve the preset's potential and radius sweep; gamma auto-picked for
// admissibility at the largest radius unless pinned by --gamma.
struct PresetPlan {
  rc::Potential V;
  std::vector<double> rs;
  std::vector<rc::cplx> lambdas;  // spectra dump points
  double det_r = 2;
  rc::BoundParams bp;
  double rho = 4;
  bool oracle = false;
  std::string note;
};

PresetPlan build_plan(const PresetOpts& po) {
  PresetPlan plan;
  plan.bp = po.bf.bp;
  plan.rho = po.bf.rho;
  plan.lambdas = {rc::cplx{2, 0}, rc::cplx{3, -0.5}};
  const std::string& id = po.id;
  if (id == "custom") {
    plan.V = potential_from_flags(po.run.pf);
    plan.rs = {1, 2};
  } else if (id == "ex1_compact") {
    plan.V.v = rc::BallIndicator{po.bf.bp.R, {-1.0, 0.0}};
    plan.rs = {1, 2, 4};
    plan.oracle = true;
    plan.note = "compactly supported well, counts vs radius";
  } else if (id == "ex2_superexp") {
    plan.V.v = rc::ExpProfile{1.0, 1.0};
    plan.rs = {1, 2, 4};
    plan.note = "super-exponential profile exp(-|x|^2)";
  } else if (id == "ex3_semiclassical") {
    plan.V.v = rc::BallIndicator{1.0, {-1.0, 0.0}};  // rescaled per h below
    plan.rs = {2};
    plan.note = "semiclassical family: count for -h^2 Lap + V at radius r/h";
  } else if (id == "ex4_sparse") {
    plan.rs = {2};
    plan.note = "sparse bump sums, counts vs bump number";
  } else if (id == "ex5_ball") {
    plan.V.v = rc::BallIndicator{1.0, rc::iu};
    plan.rs = {2};
    plan.note = "imaginary ball wells, upper-half-plane counts vs R";
  } else if (id == "ex6_tube") {
    plan.V.v = rc::TubeIndicator{1.0, {1.0, 0.0}};
    plan.rs = {1, 2};
    plan.note = "tube indicator, N_V(r) vs R^d r^d";
  } else {
    throw rc::error("unknown preset id '" + id + "'");
  }
  if (!po.sweep_r.empty()) plan.rs = parse_dlist(po.sweep_r);
  if (!po.bf.gamma_given) {
    double v0 = rc::lp_norm(plan.V, (plan.V.dim + 1) / 2.0);
    plan.bp.gamma = auto_gamma(plan.bp, v0, *std::max_element(plan.rs.begin(), plan.rs.end()));
  }
  return plan;
}

int cmd_validate(const PresetOpts& po) {
  PresetPlan plan = build_plan(po);
  std::optional<rc::PotentialNorms> norms;
  rc::BoundParams p = plan.bp;
  p.r = *std::max_element(plan.rs.begin(), plan.rs.end());
  norms = rc::compute_norms(plan.V, p.gamma, plan.rho, p.R);
  bool clean = true;
  for (const Hypothesis& h : check_hypotheses(p, plan.rho, norms)) {
    std::cout << (h.ok ? "satisfied  " : "VIOLATED   ") << h.text << "\n";
    clean = clean && h.ok;
  }
  std::cout << (clean ? "all hypotheses satisfied\n" : "hypotheses violated\n");
  return 0;  // validation itself never fails
}

int cmd_run_preset(const PresetOpts& po) {
  if (po.run.out.empty()) throw rc::error("run-preset requires --out");
  PresetPlan plan = build_plan(po);

  {  // refusal on violated hypotheses, naming each constraint
    rc::BoundParams p = plan.bp;
    p.r = *std::max_element(plan.rs.begin(), plan.rs.end());
    auto norms = rc::compute_norms(plan.V, p.gamma, plan.rho, p.R);
    std::string violated;
    for (const Hypothesis& h : check_hypotheses(p, plan.rho, norms))
      if (!h.ok) violated += "  " + h.text + "\n";
    if (!violated.empty()) {
      std::cerr << "preset refused, violated hypotheses:\n" << violated;
      return 2;
    }
  }

  Sink sink;
  sink.dir.emplace(po.run.out);
  StageLog stages;
  rc::CountConfig cfg = preset_config(po);
  std::vector<CountRow> rows;

  stages.run("norms", [&] {
    sink.emit("norms.csv", norms_csv(rc::compute_norms(plan.V, plan.bp.gamma, plan.rho,
                                                       plan.bp.R)));
  });
  stages.run("spectra", [&] {
    auto grid = rc::default_grid(plan.V, std::min(po.run.grid_n, 1000));
    for (size_t i = 0; i < plan.lambdas.size(); ++i) {
      rc::BSMatrix M = rc::assemble_bs(plan.V, grid, plan.lambdas[i]);
      sink.emit("spectrum_" + std::to_string(i) + ".csv", spectrum_csv(rc::singular_values(M)));
    }
  });
  stages.run("det_contour", [&] {
    auto grid = rc::default_grid(plan.V, std::min(po.run.grid_n, 1000));
    std::vector<rc::cplx> contour;
    for (int k = 0; k < 64; ++k)
      contour.push_back(plan.det_r * std::exp(rc::iu * (2.0 * rc::pi * k / 64)));
    sink.emit("det_contour.csv", det_csv(rc::det_on_contour(plan.V, grid, contour, 4)));
  });

  if (po.id == "ex3_semiclassical") {
    stages.run("counts", [&] {
      // -h^2 Lap + V has resonances h * (resonances of -Lap + h^{-2} V), so
      // n_V(r, h) = count of W_h = h^{-2} V inside radius r/h.
      rc::CsvWriter csv({"h", "r_effective", "n", "N", "ln_inv_h", "ln_n"});
      for (double h : {1.0, 0.5, 0.25}) {
        rc::Potential Wh = plan.V;
        std::get<rc::BallIndicator>(Wh.v).h /= h * h;
        double r_eff = plan.rs[0] / h;
        rc::CountReport rep = rc::count_in_disk(Wh, r_eff, cfg);
        attach_bounds(rep, Wh, plan.bp, plan.rho, po.cal_C);
        sink.emit("count_h_" + rc::fmt_double(h) + ".json", report_json(rep).dump(2) + "\n");
        rows.push_back({r_eff, rep});
        csv.row_numeric({h, r_eff, static_cast<double>(rep.n), rep.N, std::log(1.0 / h),
                         rep.n > 0 ? std::log(static_cast<double>(rep.n)) : std::nan("")});
      }
      sink.emit("semiclassical.csv", csv.text());
    });
  } else if (po.id == "ex4_sparse") {
    stages.run("counts", [&] {
      rc::CsvWriter csv({"bumps", "n", "N"});
      for (int m : {1, 2, 3}) {
        rc::SparseSum s;
        for (int b = 0; b < m; ++b)
          s.bumps.push_back({{4.0 * b, 0, 0}, 1.0, {-5.0, 0.0}});
        rc::Potential Vm;
        Vm.v = s;
        rc::CountReport rep = rc::count_in_disk(Vm, plan.rs[0], cfg);
        attach_bounds(rep, Vm, plan.bp, plan.rho, po.cal_C);
        sink.emit("count_bumps_" + std::to_string(m) + ".json", report_json(rep).dump(2) + "\n");
        rows.push_back({plan.rs[0], rep});
        csv.row_numeric({static_cast<double>(m), static_cast<double>(rep.n), rep.N});
      }
      sink.emit("sparse.csv", csv.text());
    });
  } else {
    stages.run("counts", [&] {
      for (double r : plan.rs) {
        rc::CountReport rep = rc::count_in_disk(plan.V, r, cfg);
        attach_bounds(rep, plan.V, plan.bp, plan.rho, po.cal_C);
        sink.emit("count_r_" + rc::fmt_double(r) + ".json", report_json(rep).dump(2) + "\n");
        rows.push_back({r, rep});
      }
    });
  }

  if (po.id == "ex5_ball") {
    stages.run("uhp_table", [&] {
      // n_V^+ vs R for V = i 1_{B(0,R)}; R^{2d-1} = R^5 comparison column.
      // The search window past R = 2 is capped (documented empirical window;
      // the cap also keeps lambda R inside the certified angular barrier).
      rc::CsvWriter csv({"R", "v0_squared", "n_plus", "max_abs_root", "C0", "R_pow_2d_minus_1"});
      for (double R : {1.0, 2.0, 4.0}) {
        UhpRow row = uhp_ball_row(R, 18.0);
        csv.row_numeric({row.R, row.v0sq, static_cast<double>(row.n_plus), row.max_abs,
                         row.v0sq > 0 ? row.max_abs / row.v0sq : 0.0, std::pow(R, 5)});
      }
      sink.emit("nplus_vs_R.csv", csv.text());
    });
  }
  if (po.id == "ex6_tube") {
    stages.run("tube_table", [&] {
      rc::CsvWriter csv({"R", "r", "N", "Rd_rd", "ratio"});
      double ratio_max = 0, ratio_min = 1e300;
      for (double R : {1.0, 4.0}) {
        rc::Potential Vt;
        Vt.v = rc::TubeIndicator{R, {1.0, 0.0}};
        for (double r : {1.0, 2.0}) {
          rc::CountReport rep = rc::count_in_disk(Vt, r, cfg);
          double rdrd = std::pow(R, 3) * std::pow(r, 3);
          double ratio = rep.N / rdrd;
          ratio_max = std::max(ratio_max, ratio);
          ratio_min = std::min(ratio_min, ratio);
          csv.row_numeric({R, r, rep.N, rdrd, ratio});
        }
      }
      sink.emit("tube_ratios.csv", csv.text());
      if (!rows.empty()) rows.front().rep.verdicts["ex6_single_constant"] =
          ratio_max <= 8.0 * std::max(ratio_min, 1e-6);
    });
  }

  stages.run("bounds_sweep", [&] {
    rc::CsvWriter csv(bounds_header());
    for (double delta : {0.25, 0.5, 1.0})
      for (double eps : {0.25, 0.5}) {
        rc::BoundParams p = plan.bp;
        p.delta = delta;
        p.eps = eps;
        p.r = plan.rs.back();
        bounds_row(csv, p, plan.rho, rc::compute_norms(plan.V, p.gamma, plan.rho, p.R));
      }
    sink.emit("bounds.csv", csv.text());
  });
  stages.run("plot_data", [&] { sink.emit("counts.csv", counts_csv(rows)); });

  if (!plan.note.empty()) stages.log += "note    " + plan.note + "\n";
  sink.emit("run_log.txt", stages.log);
  sink.finish();
  if (!stages.failures.empty()) {
    std::cerr << "failed stages (partial outputs kept, see manifest):\n";
    for (const std::string& f : stages.failures) std::cerr << "  " << f << "\n";
    return 2;
  }
  return all_verdicts_exit(rows);
}

}  // namespace

int main(int argc, char** argv) {
  const char* env_threads = std::getenv("RESCOUNT_THREADS");
  rc::set_blas_threads(env_threads ? std::max(1, std::atoi(env_threads)) : 1);

  CLI::App app{"resonance counting toolkit"};
  app.require_subcommand(1);

  // --- norms ---
  PotentialFlags norms_pf;
  double norms_gamma = 1, norms_rho = 4, norms_R = 1;
  std::string norms_out;
  auto* c_norms = app.add_subcommand("norms", "weighted norms of a potential");
  add_potential_flags(c_norms, norms_pf);
  c_norms->add_option("--gamma", norms_gamma);
  c_norms->add_option("--rho", norms_rho);
  c_norms->add_option("--R", norms_R);
  c_norms->add_option("--out", norms_out, "output directory (default: stdout)");

  // --- assemble ---
  PotentialFlags asm_pf;
  std::string asm_lambda = "2";
  int asm_n = 500;
  bool asm_corrected = false;
  auto* c_asm = app.add_subcommand("assemble", "assemble the kernel matrix, print stats");
  add_potential_flags(c_asm, asm_pf);
  c_asm->add_option("--lambda", asm_lambda, "spectral point re[,im]");
  c_asm->add_option("--grid-n", asm_n);
  c_asm->add_flag("--corrected", asm_corrected, "cell-exact corrected assembly (ball grids)");

  // --- svd ---
  PotentialFlags svd_pf;
  std::string svd_lambda = "2", svd_out;
  int svd_n = 500;
  auto* c_svd = app.add_subcommand("svd", "singular spectrum CSV");
  add_potential_flags(c_svd, svd_pf);
  c_svd->add_option("--lambda", svd_lambda);
  c_svd->add_option("--grid-n", svd_n);
  c_svd->add_option("--out", svd_out);

  // --- det ---
  PotentialFlags det_pf;
  double det_r = 2;
  int det_nodes = 64, det_alpha = 4, det_n = 500;
  std::string det_out;
  auto* c_det = app.add_subcommand("det", "determinant samples on a circle contour");
  add_potential_flags(c_det, det_pf);
  c_det->add_option("--r", det_r, "contour radius");
  c_det->add_option("--nodes", det_nodes);
  c_det->add_option("--alpha", det_alpha);
  c_det->add_option("--grid-n", det_n);
  c_det->add_option("--out", det_out);

  // --- count ---
  PotentialFlags cnt_pf;
  double cnt_r = 2, cnt_cal = 10;
  int cnt_n = 2000, cnt_rank = 256, cnt_alpha = 4;
  uint64_t cnt_seed = 20260815;
  bool cnt_locate = false, cnt_oracle = false, cnt_bounds = false, cnt_families = false;
  BoundFlags cnt_bf;
  std::string cnt_out;
  auto* c_cnt = app.add_subcommand("count", "resonance count in a disk, JSON report");
  add_potential_flags(c_cnt, cnt_pf);
  c_cnt->add_option("--count-r", cnt_r, "disk radius");
  c_cnt->add_option("--grid-n", cnt_n);
  c_cnt->add_option("--compress-rank", cnt_rank, "0 = dense eigensolve");
  c_cnt->add_option("--det-alpha", cnt_alpha);
  c_cnt->add_option("--seed", cnt_seed);
  c_cnt->add_flag("--locate", cnt_locate, "also locate individual zeros");
  c_cnt->add_flag("--oracle", cnt_oracle, "attach radial-oracle cross-check (balls)");
  c_cnt->add_flag("--families", cnt_families,
                  "certify every phase-family winding and the raw determinant winding");
  c_cnt->add_flag("--with-bounds", cnt_bounds, "attach bound values and verdicts");
  c_cnt->add_option("--cal-C", cnt_cal, "calibration constant for verdicts");
  add_bound_flags(c_cnt, cnt_bf);
  c_cnt->add_option("--out", cnt_out);

  // --- bounds ---
  PotentialFlags bnd_pf;
  BoundFlags bnd_bf;
  std::string bnd_out, bnd_sweep_delta, bnd_sweep_eps, bnd_sweep_gamma;
  auto* c_bnd = app.add_subcommand("bounds", "bound right-hand sides CSV");
  add_potential_flags(c_bnd, bnd_pf);
  add_bound_flags(c_bnd, bnd_bf);
  c_bnd->add_option("--sweep-delta", bnd_sweep_delta, "comma list");
  c_bnd->add_option("--sweep-eps", bnd_sweep_eps, "comma list");
  c_bnd->add_option("--sweep-gamma", bnd_sweep_gamma, "comma list");
  c_bnd->add_option("--out", bnd_out);

  // --- oracle1d ---
  std::string o1_v0 = "-5", o1_out;
  double o1_a = 1, o1_disk = 6;
  double o1_relo = 0, o1_rehi = 0, o1_imlo = 0, o1_imhi = 0;
  auto* c_o1 = app.add_subcommand("oracle1d", "square-well secular roots CSV");
  c_o1->add_option("--v0", o1_v0, "well height re[,im]");
  c_o1->add_option("--a", o1_a, "half width");
  c_o1->add_option("--disk-r", o1_disk, "search the enclosing box of this disk");
  c_o1->add_option("--re-lo", o1_relo);
  c_o1->add_option("--re-hi", o1_rehi);
  c_o1->add_option("--im-lo", o1_imlo);
  c_o1->add_option("--im-hi", o1_imhi);
  c_o1->add_option("--out", o1_out);

  // --- oracle3d ---
  std::string o3_v0 = "-10", o3_out;
  double o3_R = 1, o3_disk = 4;
  int o3_ell = -1;
  double o3_relo = 0, o3_rehi = 0, o3_imlo = 0, o3_imhi = 0;
  auto* c_o3 = app.add_subcommand("oracle3d", "radial ball secular roots CSV");
  c_o3->add_option("--v0", o3_v0, "well height re[,im]");
  c_o3->add_option("--R", o3_R, "ball radius");
  c_o3->add_option("--ell-max", o3_ell, "-1 = certified barrier");
  c_o3->add_option("--disk-r", o3_disk, "search the enclosing box of this disk");
  c_o3->add_option("--re-lo", o3_relo);
  c_o3->add_option("--re-hi", o3_rehi);
  c_o3->add_option("--im-lo", o3_imlo);
  c_o3->add_option("--im-hi", o3_imhi);
  c_o3->add_option("--out", o3_out);

  // --- run-preset / validate ---
  PresetOpts po;
  auto* c_run = app.add_subcommand("run-preset", "run an experiment preset into --out");
  c_run->add_option("--id", po.id,
                    "ex1_compact|ex2_superexp|ex3_semiclassical|ex4_sparse|ex5_ball|ex6_tube|custom");
  add_potential_flags(c_run, po.run.pf);
  add_bound_flags(c_run, po.bf);
  c_run->add_option("--out", po.run.out, "output directory (required)");
  c_run->add_option("--grid-n", po.run.grid_n);
  c_run->add_option("--compress-rank", po.run.compress_rank);
  c_run->add_option("--seed", po.run.seed);
  c_run->add_option("--sweep-r", po.sweep_r, "comma list of counting radii");
  c_run->add_option("--cal-C", po.cal_C);
  c_run->add_flag("--locate", po.locate);
  c_run->add_flag("--oracle", po.oracle);

  PresetOpts vo;
  auto* c_val = app.add_subcommand("validate", "hypothesis report for a preset");
  c_val->add_option("--id", vo.id);
  add_potential_flags(c_val, vo.run.pf);
  add_bound_flags(c_val, vo.bf);
  c_val->add_option("--sweep-r", vo.sweep_r);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*c_norms) {
      rc::Potential V = potential_from_flags(norms_pf);
      Sink sink;
      if (!norms_out.empty()) sink.dir.emplace(norms_out);
      sink.emit("norms.csv", norms_csv(rc::compute_norms(V, norms_gamma, norms_rho, norms_R)));
      sink.finish();
      return 0;
    }
    if (*c_asm) {
      rc::Potential V = potential_from_flags(asm_pf);
      rc::cplx lambda = parse_cplx(asm_lambda);
      rc::BSMatrix M;
      if (asm_corrected) {
        const auto* ball = std::get_if<rc::BallIndicator>(&V.v);
        if (!ball) throw rc::error("--corrected needs a ball potential");
        rc::BallGrid bg = rc::ball_grid_for(asm_n, ball->R);
        M = rc::assemble_bs_corrected(V, bg, rc::build_correction(bg), lambda);
      } else {
        M = rc::assemble_bs(V, rc::default_grid(V, asm_n), lambda);
      }
      std::cout << "n " << M.size() << "\nlambda " << rc::fmt_double(lambda.real()) << " "
                << rc::fmt_double(lambda.imag()) << "\nfrobenius "
                << rc::fmt_double(M.entries.norm()) << "\nmax_abs "
                << rc::fmt_double(M.entries.cwiseAbs().maxCoeff()) << "\n";
      return 0;
    }
    if (*c_svd) {
      rc::Potential V = potential_from_flags(svd_pf);
      rc::BSMatrix M = rc::assemble_bs(V, rc::default_grid(V, svd_n), parse_cplx(svd_lambda));
      Sink sink;
      if (!svd_out.empty()) sink.dir.emplace(svd_out);
      sink.emit("spectrum.csv", spectrum_csv(rc::singular_values(M)));
      sink.finish();
      return 0;
    }
    if (*c_det) {
      rc::Potential V = potential_from_flags(det_pf);
      std::vector<rc::cplx> contour;
      for (int k = 0; k < det_nodes; ++k)
        contour.push_back(det_r * std::exp(rc::iu * (2.0 * rc::pi * k / det_nodes)));
      auto samples = rc::det_on_contour(V, rc::default_grid(V, det_n), contour, det_alpha);
      Sink sink;
      if (!det_out.empty()) sink.dir.emplace(det_out);
      sink.emit("det_contour.csv", det_csv(samples));
      sink.finish();
      return 0;
    }
    if (*c_cnt) {
      rc::Potential V = potential_from_flags(cnt_pf);
      rc::CountConfig cfg;
      cfg.alpha = cnt_alpha;
      cfg.target_n = cnt_n;
      cfg.compress_rank = cnt_rank;
      cfg.locate = cnt_locate;
      cfg.attach_oracle = cnt_oracle;
      cfg.families = cnt_families;
      cfg.seed = cnt_seed;
      rc::CountReport rep = rc::count_in_disk(V, cnt_r, cfg);
      if (cnt_bounds) attach_bounds(rep, V, cnt_bf.bp, cnt_bf.rho, cnt_cal);
      Sink sink;
      if (!cnt_out.empty()) sink.dir.emplace(cnt_out);
      sink.emit("count.json", report_json(rep).dump(2) + "\n");
      sink.finish();
      for (const auto& [k, ok] : rep.verdicts)
        if (!ok) return 1;
      return 0;
    }
    if (*c_bnd) {
      rc::Potential V = potential_from_flags(bnd_pf);
      std::vector<double> deltas = bnd_sweep_delta.empty() ? std::vector<double>{bnd_bf.bp.delta}
                                                           : parse_dlist(bnd_sweep_delta);
      std::vector<double> epss = bnd_sweep_eps.empty() ? std::vector<double>{bnd_bf.bp.eps}
                                                       : parse_dlist(bnd_sweep_eps);
      std::vector<double> gammas = bnd_sweep_gamma.empty() ? std::vector<double>{bnd_bf.bp.gamma}
                                                           : parse_dlist(bnd_sweep_gamma);
      rc::CsvWriter csv(bounds_header());
      for (double g : gammas)
        for (double dl : deltas)
          for (double ep : epss) {
            rc::BoundParams p = bnd_bf.bp;
            p.gamma = g;
            p.delta = dl;
            p.eps = ep;
            bounds_row(csv, p, bnd_bf.rho, rc::compute_norms(V, g, bnd_bf.rho, p.R));
          }
      Sink sink;
      if (!bnd_out.empty()) sink.dir.emplace(bnd_out);
      sink.emit("bounds.csv", csv.text());
      sink.finish();
      return 0;
    }
    if (*c_o1) {
      rc::Rect box{o1_relo, o1_rehi, o1_imlo, o1_imhi};
      if (box.re_hi <= box.re_lo || box.im_hi <= box.im_lo)
        box = {-1.05 * o1_disk, 1.05 * o1_disk, -1.05 * o1_disk, 1.05 * o1_disk};
      rc::cplx v0 = parse_cplx(o1_v0);
      auto roots = rc::oracle_1d_squarewell(v0, o1_a, box);
      rc::CsvWriter csv({"ell", "lambda_re", "lambda_im", "residual"});
      for (rc::cplx z : roots)
        csv.row_numeric({0.0, z.real(), z.imag(), std::abs(rc::secular_1d(v0, o1_a, z))});
      Sink sink;
      if (!o1_out.empty()) sink.dir.emplace(o1_out);
      sink.emit("oracle1d.csv", csv.text());
      sink.finish();
      return 0;
    }
    if (*c_o3) {
      rc::Rect box{o3_relo, o3_rehi, o3_imlo, o3_imhi};
      if (box.re_hi <= box.re_lo || box.im_hi <= box.im_lo)
        box = {-1.05 * o3_disk, 1.05 * o3_disk, -1.05 * o3_disk, 1.05 * o3_disk};
      auto modes = rc::oracle_3d_radial(parse_cplx(o3_v0), o3_R, o3_ell, box);
      Sink sink;
      if (!o3_out.empty()) sink.dir.emplace(o3_out);
      sink.emit("oracle3d.csv", oracle_csv(modes));
      sink.finish();
      return 0;
    }
    if (*c_run) return cmd_run_preset(po);
    if (*c_val) return cmd_validate(vo);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
