// rgrade: batch experiment runner for restarted random-walk hitting times.
//
// Subcommands: grade, bounds, mc, disk, bm, kernel, verify. Each command
// writes a CSV report plus a JSON summary and echoes the CSV to stdout.
// Floats in reports carry 12 significant digits so reruns diff clean.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rgrade/bounds.hpp"
#include "rgrade/cache.hpp"
#include "rgrade/continuum.hpp"
#include "rgrade/disk.hpp"
#include "rgrade/errors.hpp"
#include "rgrade/grade.hpp"
#include "rgrade/harmonic.hpp"
#include "rgrade/montecarlo.hpp"
#include "rgrade/verify.hpp"

namespace {

using nlohmann::json;
using namespace rgrade;

constexpr const char* kVersion = "0.1.0";

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string coords_str(const Point& p) {
  std::string s;
  for (int i = 0; i < p.dim(); ++i) {
    if (i) s += ';';
    s += std::to_string(p[i]);
  }
  return s;
}

Point parse_point(const std::string& text, int d) {
  std::vector<Coord> c;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) c.push_back(std::stoll(tok));
  if (static_cast<int>(c.size()) != d) {
    throw std::invalid_argument("expected " + std::to_string(d) +
                                " comma-separated coordinates, got '" + text + "'");
  }
  return Point(std::span<const Coord>(c.data(), c.size()));
}

int env_threads() {
  if (const char* e = std::getenv("RESTART_GRADE_THREADS"); e && *e) {
    return std::max(1, std::atoi(e));
  }
  return 1;
}

struct Report {
  std::string command;
  std::string csv_header;
  std::vector<std::string> csv_rows;
  json inputs;
  json outputs;
  json timings_ms;

  void emit(const std::string& out_prefix) const {
    std::string csv = csv_header + "\n";
    for (const auto& r : csv_rows) csv += r + "\n";

    json summary;
    summary["command"] = command;
    summary["inputs"] = inputs;
    summary["outputs"] = outputs;
    summary["versions"] = {{"restart-grade", kVersion}};
    summary["timings_ms"] = timings_ms;

    {
      std::ofstream f(out_prefix + ".csv", std::ios::binary | std::ios::trunc);
      f << csv;
    }
    {
      std::ofstream f(out_prefix + ".json", std::ios::binary | std::ios::trunc);
      f << summary.dump(2) << "\n";
    }
    std::cout << csv;
    std::cerr << "rgrade: wrote " << out_prefix << ".csv and " << out_prefix
              << ".json\n";
  }
};

class StageTimer {
 public:
  explicit StageTimer(json& sink) : sink_(sink) {}
  template <class F>
  auto time(const std::string& name, F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    auto v = f();
    sink_[name] = elapsed_ms(t0);
    return v;
  }

 private:
  static double elapsed_ms(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - t0)
        .count();
  }
  json& sink_;
};

// Values from --config JSON backfill options the user left at defaults.
json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("cannot open config file " + path);
  return json::parse(f);
}

template <class T>
void backfill(const CLI::Option* opt, const json& cfg, const char* key, T& value) {
  if (opt->count() == 0 && cfg.contains(key)) value = cfg[key].get<T>();
}

// Profile plus fitted envelope sized so the fit box keeps the required
// margin inside the table.
struct BoundsKit {
  HarmonicProfile profile;
  EnvelopePair envelope;
};

BoundsKit make_bounds_kit(int d, int fit_L) {
  BoundsKit kit;
  if (d == 1) {
    kit.profile = build_profile(line_kernel(fit_L + 2), Point::zero(1));
    kit.envelope = exact_envelope_1d();
  } else if (d == 2) {
    kit.profile = build_profile(cached_potential_kernel(fit_L + 4), Point::zero(2));
    kit.envelope = fit_envelope_2d(kit.profile, fit_L);
  } else {
    kit.profile = build_profile(cached_green_table(fit_L + 2, d), Point::zero(d));
    kit.envelope = fit_envelope_d(kit.profile, fit_L);
  }
  return kit;
}

// ---------------------------------------------------------------------------

int cmd_grade(int d, const std::string& x_str, int L, double vi_tol,
              double bis_tol, const std::string& out) {
  Report rep;
  rep.command = "grade";
  StageTimer timer(rep.timings_ms);

  RestartProblem p;
  p.d = d;
  p.x0 = parse_point(x_str, d);
  p.L = L;
  p.vi_tol = vi_tol;
  p.bis_tol = bis_tol;
  rep.inputs = {{"d", d}, {"x", x_str}, {"L", p.resolved_L()},
                {"vi_tol", vi_tol}, {"bis_tol", bis_tol}};

  const GradeSolution sol = timer.time("solve", [&] { return solve_grade(p); });
  const auto gaps = threshold_gap(sol);
  const auto restart_set = extract_strategy(sol);

  rep.csv_header =
      "d,x,L,gstar,bellman_residual,bisection_iterations,value_sweeps,"
      "restart_set_size,c_out,c_in";
  rep.csv_rows.push_back(
      std::to_string(d) + "," + coords_str(sol.x0) + "," + std::to_string(sol.L) +
      "," + fmt(sol.g_star) + "," + fmt(sol.bellman_residual) + "," +
      std::to_string(sol.bisection_iterations) + "," +
      std::to_string(sol.value_sweeps) + "," + std::to_string(restart_set.size()) +
      "," + fmt(gaps.first) + "," + fmt(gaps.second));
  rep.outputs = {{"gstar", sol.g_star},
                 {"c_out", gaps.first},
                 {"c_in", gaps.second},
                 {"restart_set_size", restart_set.size()}};
  rep.emit(out);
  return 0;
}

int cmd_bounds(int d, const std::string& x_str, int L, const std::string& out) {
  Report rep;
  rep.command = "bounds";
  StageTimer timer(rep.timings_ms);
  const Point x = parse_point(x_str, d);
  rep.inputs = {{"d", d}, {"x", x_str}, {"L", L}};

  const BoundsKit kit = timer.time("profile_and_envelope",
                                   [&] { return make_bounds_kit(d, L); });
  const GradeBounds gb = timer.time(
      "quadrature", [&] { return grade_bounds(kit.profile, kit.envelope, x); });
  const double asym = asymptotic_grade(x, kit.profile);

  rep.csv_header =
      "d,x,L,envelope_c,floor_eps,floor_cross,h,h_star,lower,upper,"
      "upper_floor_part,asymptotic";
  rep.csv_rows.push_back(std::to_string(d) + "," + coords_str(x) + "," +
                         std::to_string(L) + "," + fmt(kit.envelope.C) + "," +
                         fmt(kit.envelope.floor_eps) + "," +
                         fmt(kit.envelope.floor_cross) + "," + fmt(gb.h) + "," +
                         fmt(gb.h_star) + "," + fmt(gb.lower) + "," +
                         fmt(gb.upper) + "," + fmt(gb.upper_floor_part) + "," +
                         fmt(asym));
  rep.outputs = {{"lower", gb.lower}, {"upper", gb.upper},
                 {"envelope_c", kit.envelope.C}, {"asymptotic", asym}};
  rep.emit(out);
  return 0;
}

int cmd_mc(int d, const std::string& x_str, const std::string& strategy,
           std::uint64_t replicates, std::uint64_t cap, std::uint64_t seed,
           const std::string& out) {
  Report rep;
  rep.command = "mc";
  StageTimer timer(rep.timings_ms);
  WalkParams wp;
  wp.d = d;
  wp.x0 = parse_point(x_str, d);
  wp.z = Point::zero(d);
  wp.replicates = replicates;
  wp.step_cap = cap;
  wp.seed = seed;
  wp.threads = env_threads();
  rep.inputs = {{"d", d}, {"x0", x_str}, {"strategy", strategy},
                {"replicates", replicates}, {"step_cap", wp.resolved_cap()},
                {"seed", seed}};

  // Strategy syntax: never | euclidean[:rho] | h[:tau] | optimal[:L]
  StrategySpec spec = StrategySpec::never();
  std::optional<HarmonicProfile> profile;  // kept alive for the h rule
  std::optional<GradeSolution> sol;
  const auto split = strategy.find(':');
  const std::string kind = strategy.substr(0, split);
  const std::string arg =
      split == std::string::npos ? "" : strategy.substr(split + 1);
  if (kind == "never") {
  } else if (kind == "euclidean") {
    spec = StrategySpec::euclidean_threshold(arg.empty() ? wp.x0.norm()
                                                         : std::stod(arg));
  } else if (kind == "h") {
    const int table_L =
        std::max(8, 2 * static_cast<int>(std::ceil(wp.x0.norm())) + 2);
    if (d == 1) {
      profile = build_profile(line_kernel(table_L), Point::zero(1));
    } else if (d == 2) {
      profile = build_profile(cached_potential_kernel(table_L), Point::zero(2));
    } else {
      profile = build_profile(cached_green_table(table_L, d), Point::zero(d));
    }
    const double tau = arg.empty() ? profile->h_at(wp.x0) : std::stod(arg);
    spec = StrategySpec::h_threshold(tau, *profile);
  } else if (kind == "optimal") {
    RestartProblem p;
    p.d = d;
    p.x0 = wp.x0;
    p.L = arg.empty() ? 0 : std::stoi(arg);
    sol = timer.time("solve", [&] { return solve_grade(p); });
    const ValueField W = sol->W;
    const double cut = sol->g_star + sol->tie_tol_abs;
    spec = StrategySpec::custom([W, cut](const Point& y) {
      return !W.idx.contains(y) || W.at(y) > cut;
    });
  } else {
    throw std::invalid_argument("unknown strategy '" + strategy +
                                "' (expected never|euclidean[:rho]|h[:tau]|optimal[:L])");
  }

  const McEstimate est =
      timer.time("simulate", [&] { return simulate_strategy(wp, spec); });

  rep.csv_header = "d,x0,strategy,replicates,step_cap,seed,censored,mean,std_error";
  rep.csv_rows.push_back(std::to_string(d) + "," + coords_str(wp.x0) + "," +
                         strategy + "," + std::to_string(est.replicates) + "," +
                         std::to_string(wp.resolved_cap()) + "," +
                         std::to_string(seed) + "," + std::to_string(est.censored) +
                         "," + fmt(est.mean) + "," + fmt(est.std_error));
  rep.outputs = {{"mean", est.mean}, {"std_error", est.std_error},
                 {"censored", est.censored}};
  if (sol) rep.outputs["gstar"] = sol->g_star;
  rep.emit(out);
  return 0;
}

int cmd_disk(double R, const std::string& x_str, const std::string& out) {
  Report rep;
  rep.command = "disk";
  StageTimer timer(rep.timings_ms);
  const Point x0 = parse_point(x_str, 2);
  rep.inputs = {{"R", R}, {"x0", x_str}};

  const int fit_L = std::max(8, static_cast<int>(std::floor(R)) + 4);
  const BoundsKit kit =
      timer.time("profile_and_envelope", [&] { return make_bounds_kit(2, fit_L); });
  const DiskReport dr = timer.time("disk_report", [&] {
    return make_disk_report(R, x0, kit.profile, kit.envelope);
  });
  const TnoBounds& tb = dr.bounds;

  rep.csv_header =
      "R,x0,exact,h1,mu_B,mu_D,resistance,lower,upper,delta_bound,prediction,"
      "abs_err,r_log_r";
  rep.csv_rows.push_back(
      fmt(R) + "," + coords_str(x0) + "," + fmt(dr.exact_at_x0) + "," +
      fmt(tb.h1) + "," + std::to_string(tb.mu_B) + "," +
      std::to_string(tb.mu_D) + "," + fmt(tb.resistance) + "," +
      fmt(tb.lower) + "," + fmt(tb.upper) + "," + fmt(tb.delta_bound) + "," +
      fmt(dr.prediction) + "," + fmt(std::abs(dr.exact_at_x0 - dr.prediction)) +
      "," + fmt(R * std::log(R)));
  rep.outputs = {{"exact", dr.exact_at_x0}, {"lower", tb.lower},
                 {"upper", tb.upper}, {"prediction", dr.prediction}};
  rep.emit(out);
  return 0;
}

int cmd_bm(int d, double r0, double x, const std::string& out) {
  Report rep;
  rep.command = "bm";
  rep.inputs = {{"d", d}, {"r0", r0}, {"x", x}};
  const BmProblem p{d, r0};
  const double closed = bm_grade(x, p);
  const double integral = bm_grade_integral(x, p);
  rep.csv_header = "d,r0,x,h,grad_sq,closed,integral,abs_diff";
  rep.csv_rows.push_back(std::to_string(d) + "," + fmt(r0) + "," + fmt(x) + "," +
                         fmt(bm_h(x, p)) + "," + fmt(bm_gradient_sq(x, p)) + "," +
                         fmt(closed) + "," + fmt(integral) + "," +
                         fmt(std::abs(closed - integral)));
  rep.outputs = {{"closed", closed}, {"integral", integral}};
  rep.emit(out);
  return 0;
}

int cmd_kernel(int d, int L, const std::string& out) {
  Report rep;
  rep.command = "kernel";
  StageTimer timer(rep.timings_ms);
  rep.inputs = {{"d", d}, {"L", L}};

  const PotentialTable t = timer.time("build_or_load", [&]() -> PotentialTable {
    if (d == 1) return line_kernel(L);
    if (d == 2) return cached_potential_kernel(L);
    return cached_green_table(L, d);
  });

  const Point e1 = Point::axis(d, 0, 1);
  Point diag = Point::zero(d);
  for (int i = 0; i < d; ++i) diag[i] = 1;
  const double v0 = t.at(Point::zero(d));
  const double p_d = t.kind == TableKind::Green ? 1.0 / v0 : 0.0;

  rep.csv_header = "d,kind,L,method,accuracy,v_origin,v_e1,v_diag,p_d";
  rep.csv_rows.push_back(std::to_string(d) + "," + table_kind_name(t.kind) + "," +
                         std::to_string(L) + "," + t.method + "," +
                         fmt(t.accuracy) + "," + fmt(v0) + "," + fmt(t.at(e1)) +
                         "," + fmt(t.at(diag)) + "," +
                         (t.kind == TableKind::Green ? fmt(p_d) : std::string()));
  rep.outputs = {{"accuracy", t.accuracy},
                 {"cache_stem", cache_stem(t.d, t.kind, t.L, t.method)}};
  if (t.kind == TableKind::Green) rep.outputs["p_d"] = p_d;
  rep.emit(out);
  return 0;
}

int cmd_verify(const std::string& suite, const std::string& out) {
  Report rep;
  rep.command = "verify";
  rep.inputs = {{"suite", suite}};
  VerifyContext ctx;
  const SuiteResult res = run_suite(suite, ctx);

  rep.csv_header = "suite,check,measured,threshold,comparator,pass";
  for (const auto& c : res.checks) {
    std::string name = c.name;
    for (auto& ch : name) {
      if (ch == ',') ch = ';';
    }
    rep.csv_rows.push_back(suite + "," + name + "," + fmt(c.measured) + "," +
                           fmt(c.threshold) + "," + c.comparator + "," +
                           (c.pass ? "1" : "0"));
  }
  rep.outputs = {{"pass", res.pass()}, {"elapsed_s", res.elapsed_s}};
  rep.timings_ms["suite"] = res.elapsed_s * 1000.0;
  rep.emit(out);
  std::cout << res.summary_line() << "\n";
  return res.pass() ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"restart-grade: hitting times of lattice random walks with restarts"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "JSON config file; flags override its values");

  auto* grade = app.add_subcommand("grade", "exact grade via value iteration + bisection");
  int g_d = 2;
  std::string g_x;
  int g_L = 0;
  double g_vi = 1e-10, g_bis = 1e-9;
  std::string g_out = "report-grade";
  auto* og_d = grade->add_option("--d", g_d, "dimension");
  auto* og_x = grade->add_option("--x", g_x, "start point, comma-separated");
  auto* og_L = grade->add_option("--L", g_L, "truncation box radius (0 = default 2|x|)");
  auto* og_vi = grade->add_option("--vi-tol", g_vi, "value-iteration tolerance");
  auto* og_bis = grade->add_option("--bis-tol", g_bis, "bisection tolerance");
  auto* og_out = grade->add_option("--out", g_out, "output path prefix");

  auto* bounds = app.add_subcommand("bounds", "integral sandwich and asymptotic forms");
  int b_d = 2;
  std::string b_x;
  int b_L = 64;
  std::string b_out = "report-bounds";
  auto* ob_d = bounds->add_option("--d", b_d, "dimension");
  auto* ob_x = bounds->add_option("--x", b_x, "point, comma-separated");
  auto* ob_L = bounds->add_option("--L", b_L, "envelope fit box radius");
  auto* ob_out = bounds->add_option("--out", b_out, "output path prefix");

  auto* mc = app.add_subcommand("mc", "Monte Carlo strategy simulation");
  int m_d = 2;
  std::string m_x, m_strategy = "euclidean";
  std::uint64_t m_reps = 10000, m_cap = 0, m_seed = 0;
  std::string m_out = "report-mc";
  auto* om_d = mc->add_option("--d", m_d, "dimension");
  auto* om_x = mc->add_option("--x0", m_x, "start point, comma-separated");
  auto* om_s = mc->add_option("--strategy", m_strategy,
                              "never|euclidean[:rho]|h[:tau]|optimal[:L]");
  auto* om_r = mc->add_option("--replicates", m_reps, "number of replicates");
  auto* om_c = mc->add_option("--cap", m_cap, "step cap per replicate (0 = default)");
  auto* om_seed = mc->add_option("--seed", m_seed, "master seed")->required();
  auto* om_out = mc->add_option("--out", m_out, "output path prefix");

  auto* disk = app.add_subcommand("disk", "lattice-disk hitting times and bounds");
  double d_R = 20.0;
  std::string d_x;
  std::string d_out = "report-disk";
  auto* od_R = disk->add_option("--R", d_R, "disk radius");
  auto* od_x = disk->add_option("--x0", d_x, "start point x1,x2");
  auto* od_out = disk->add_option("--out", d_out, "output path prefix");

  auto* bm = app.add_subcommand("bm", "Brownian closed forms");
  int bm_d = 2;
  double bm_r0 = 1.0, bm_x = 2.0;
  std::string bm_out = "report-bm";
  auto* obm_d = bm->add_option("--d", bm_d, "dimension");
  auto* obm_r0 = bm->add_option("--r0", bm_r0, "target ball radius");
  auto* obm_x = bm->add_option("--x", bm_x, "start radius |x|");
  auto* obm_out = bm->add_option("--out", bm_out, "output path prefix");

  auto* kernel = app.add_subcommand("kernel", "build/load potential tables");
  int k_d = 2;
  int k_L = 32;
  std::string k_out = "report-kernel";
  auto* ok_d = kernel->add_option("--d", k_d, "dimension");
  auto* ok_L = kernel->add_option("--L", k_L, "table box radius");
  auto* ok_out = kernel->add_option("--out", k_out, "output path prefix");

  auto* verify = app.add_subcommand("verify", "run a named verification suite");
  std::string v_suite;
  std::string v_out = "report-verify";
  verify->add_option("suite", v_suite,
                     "one of: z1-exact z2-asymptotic z3-asymptotic sandwich disk continuum")
      ->required();
  auto* ov_out = verify->add_option("--out", v_out, "output path prefix");

  CLI11_PARSE(app, argc, argv);

  try {
    const json cfg = load_config(config_path);
    if (grade->parsed()) {
      backfill(og_d, cfg, "d", g_d);
      backfill(og_x, cfg, "x", g_x);
      backfill(og_L, cfg, "L", g_L);
      backfill(og_vi, cfg, "vi_tol", g_vi);
      backfill(og_bis, cfg, "bis_tol", g_bis);
      backfill(og_out, cfg, "out", g_out);
      if (g_x.empty()) throw std::invalid_argument("--x is required for grade");
      return cmd_grade(g_d, g_x, g_L, g_vi, g_bis, g_out);
    }
    if (bounds->parsed()) {
      backfill(ob_d, cfg, "d", b_d);
      backfill(ob_x, cfg, "x", b_x);
      backfill(ob_L, cfg, "L", b_L);
      backfill(ob_out, cfg, "out", b_out);
      if (b_x.empty()) throw std::invalid_argument("--x is required for bounds");
      return cmd_bounds(b_d, b_x, b_L, b_out);
    }
    if (mc->parsed()) {
      backfill(om_d, cfg, "d", m_d);
      backfill(om_x, cfg, "x0", m_x);
      backfill(om_s, cfg, "strategy", m_strategy);
      backfill(om_r, cfg, "replicates", m_reps);
      backfill(om_c, cfg, "cap", m_cap);
      backfill(om_seed, cfg, "seed", m_seed);
      backfill(om_out, cfg, "out", m_out);
      if (m_x.empty()) throw std::invalid_argument("--x0 is required for mc");
      return cmd_mc(m_d, m_x, m_strategy, m_reps, m_cap, m_seed, m_out);
    }
    if (disk->parsed()) {
      backfill(od_R, cfg, "R", d_R);
      backfill(od_x, cfg, "x0", d_x);
      backfill(od_out, cfg, "out", d_out);
      if (d_x.empty()) throw std::invalid_argument("--x0 is required for disk");
      return cmd_disk(d_R, d_x, d_out);
    }
    if (bm->parsed()) {
      backfill(obm_d, cfg, "d", bm_d);
      backfill(obm_r0, cfg, "r0", bm_r0);
      backfill(obm_x, cfg, "x", bm_x);
      backfill(obm_out, cfg, "out", bm_out);
      return cmd_bm(bm_d, bm_r0, bm_x, bm_out);
    }
    if (kernel->parsed()) {
      backfill(ok_d, cfg, "d", k_d);
      backfill(ok_L, cfg, "L", k_L);
      backfill(ok_out, cfg, "out", k_out);
      return cmd_kernel(k_d, k_L, k_out);
    }
    if (verify->parsed()) {
      backfill(ov_out, cfg, "out", v_out);
      return cmd_verify(v_suite, v_out);
    }
  } catch (const NumericError& e) {
    json err = {{"error", {{"kind", "numeric"}, {"message", e.what()},
                           {"residual", e.residual()}}}};
    std::cout << err.dump() << "\n";
    return 2;
  } catch (const std::exception& e) {
    json err = {{"error", {{"kind", "invalid-argument"}, {"message", e.what()}}}};
    std::cout << err.dump() << "\n";
    return 1;
  }
  return 1;
}
