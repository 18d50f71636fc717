#include "rgrade/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "rgrade/detail/quadrature.hpp"
#include "rgrade/errors.hpp"

namespace rgrade {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double raw_envelope(const EnvelopePair& e, double s, double sign) {
  if (e.d == 1) return 1.0;
  if (e.d == 2) {
    return 0.5 * std::exp(-2.0 * (s - e.b)) * (1.0 + sign * e.C * std::exp(-s));
  }
  const double u = e.h_inf - s;
  const double alpha = (2.0 * e.d - 2.0) / (e.d - 2.0);
  const double beta = 1.0 / (e.d - 2.0);
  const double dd = static_cast<double>(e.d);
  return (dd - 2.0) * (dd - 2.0) / dd * std::pow(u, alpha) *
         (1.0 + sign * e.C * std::pow(u, beta));
}

// Location of the single interior maximum of the raw lower formula on its
// positive branch; -1 when there is none (C = 0).
double raw_lower_crit(const EnvelopePair& e, double floor_end) {
  if (e.C <= 0.0) return -1.0;
  if (e.d == 2) return std::log(1.5 * e.C);
  const double alpha = (2.0 * e.d - 2.0) / (e.d - 2.0);
  const double beta = 1.0 / (e.d - 2.0);
  const double uc = std::pow(alpha / (e.C * (alpha + beta)), 1.0 / beta);
  return std::max(e.h_inf - uc, floor_end);
}

// Largest value of the (floored) lower envelope over [s1, s2]: endpoints
// plus the single interior critical point of the raw formula.
double lower_max_on(const EnvelopePair& e, double s1, double s2) {
  if (e.d == 1) return 1.0;
  double m = std::max(e.lower(s1), e.lower(s2));
  const double sc = raw_lower_crit(e, e.floor_end);
  if (sc > s1 && sc < s2) m = std::max(m, e.lower(sc));
  return m;
}

struct EdgeScan {
  // Directed edges (x, y) with base x != origin and both endpoints in the
  // table; precomputed once per fit.
  std::vector<double> vh;    // V_h(x)
  std::vector<double> h_lo;  // min(h(x), h(y))
  std::vector<double> h_hi;  // max(h(x), h(y))
  double sup_s = 0.0;
};

EdgeScan collect_edges(const HarmonicProfile& profile, int box_L) {
  if (box_L + 1 > profile.L) {
    throw std::invalid_argument(
        "envelope fit box must leave a one-cell margin inside the profile");
  }
  EdgeScan scan;
  const BoxIndexer box(profile.d, box_L);
  scan.vh.reserve(box.size() * 2 * static_cast<std::size_t>(profile.d));
  for (std::size_t i = 0; i < box.size(); ++i) {
    const Point x = box.unflatten(i);
    if (x.is_origin()) continue;
    const double hx = profile.h_at(x);
    const double vh = local_variance(profile, x);
    for (const Point& y : neighbors(x)) {
      const double hy = profile.h_at(y);
      scan.vh.push_back(vh);
      scan.h_lo.push_back(std::min(hx, hy));
      scan.h_hi.push_back(std::max(hx, hy));
      scan.sup_s = std::max({scan.sup_s, hx, hy});
    }
  }
  return scan;
}

// Floor parameters for a candidate C. Two passes: the epsilon from edges
// touching the nonpositive region determines where the constant piece
// rejoins the raw formula, which may pull further edges into the region;
// the second pass over the enlarged region is conservative.
void set_floor(EnvelopePair& env, const EdgeScan& scan) {
  if (env.d == 2) {
    env.floor_end = env.C > 1.0 ? std::log(env.C) : 0.0;
  } else {
    env.floor_end =
        std::max(0.0, env.h_inf - std::pow(env.C, -(env.d - 2.0)));
  }
  env.floor_eps = 0.0;
  env.floor_cross = 0.0;
  if (env.floor_end <= 0.0) return;

  const double sc = raw_lower_crit(env, env.floor_end);
  const double raw_max = env.raw_lower(sc);
  if (!(raw_max > 0.0)) {
    env.floor_eps = 0.0;  // degenerate; the validity scan rejects this C
    env.floor_cross = env.floor_end;
    return;
  }

  const auto eps_over = [&](double region_end) {
    double vmin = kInf;
    for (std::size_t i = 0; i < scan.vh.size(); ++i) {
      if (scan.h_lo[i] < region_end) vmin = std::min(vmin, scan.vh[i]);
    }
    return std::isfinite(vmin) ? std::min(0.5 * vmin, 0.9 * raw_max)
                               : 0.9 * raw_max;
  };
  // Where the rising branch of the raw formula reaches eps.
  const auto crossing = [&](double eps) {
    double lo = env.floor_end, hi = sc;
    for (int i = 0; i < 80; ++i) {
      const double mid = 0.5 * (lo + hi);
      (env.raw_lower(mid) < eps ? lo : hi) = mid;
    }
    return hi;
  };

  double eps = eps_over(env.floor_end);
  double cross = crossing(eps);
  eps = eps_over(cross);
  env.floor_cross = crossing(eps);
  env.floor_eps = eps;
}

bool envelope_valid(const EnvelopePair& env, const EdgeScan& scan) {
  for (std::size_t i = 0; i < scan.vh.size(); ++i) {
    if (!envelope_holds_on_edge(env, scan.vh[i], scan.h_lo[i], scan.h_hi[i]))
      return false;
  }
  return true;
}

EnvelopePair fit_envelope(const HarmonicProfile& profile, int box_L) {
  const EdgeScan scan = collect_edges(profile, box_L);

  EnvelopePair env;
  env.d = profile.d;
  env.b = profile.b;
  env.h_inf = profile.h_inf;
  env.sup_s = scan.sup_s;
  env.fit_box_L = box_L;

  const auto valid = [&](double c) {
    env.C = c;
    set_floor(env, scan);
    return envelope_valid(env, scan);
  };

  double hi = 1.0;
  int doublings = 0;
  while (!valid(hi)) {
    if (++doublings > 40) {
      throw NumericError(
          "no envelope constant up to 2^40 satisfies the edge inequality "
          "(potential table suspect)",
          hi);
    }
    hi *= 2.0;
  }
  double lo = hi * 0.5;  // invalid (or the trivial start)
  while (hi - lo > 0.005 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (valid(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  env.C = hi;
  set_floor(env, scan);
  return env;
}

}  // namespace

double EnvelopePair::upper(double s) const { return raw_envelope(*this, s, +1.0); }

double EnvelopePair::raw_lower(double s) const { return raw_envelope(*this, s, -1.0); }

double EnvelopePair::lower(double s) const {
  if (d != 1 && s < floor_cross) return floor_eps;
  return raw_lower(s);
}

bool envelope_holds_on_edge(const EnvelopePair& env, double vh, double h_x,
                            double h_y) {
  const double s1 = std::min(h_x, h_y);
  const double s2 = std::max(h_x, h_y);
  // g+ is decreasing, so its minimum over the interval sits at s2.
  if (vh > env.upper(s2)) return false;
  return lower_max_on(env, s1, s2) <= vh;
}

EnvelopePair fit_envelope_2d(const HarmonicProfile& profile, int box_L) {
  if (profile.d != 2) throw std::invalid_argument("fit_envelope_2d needs a d=2 profile");
  return fit_envelope(profile, box_L);
}

EnvelopePair fit_envelope_d(const HarmonicProfile& profile, int box_L) {
  if (profile.d < 3) throw std::invalid_argument("fit_envelope_d needs a d>=3 profile");
  return fit_envelope(profile, box_L);
}

EnvelopePair exact_envelope_1d() {
  EnvelopePair env;
  env.d = 1;
  env.C = 0.0;
  env.h_inf = kInf;
  env.sup_s = kInf;
  return env;
}

double h_star(const HarmonicProfile& profile, const Point& x) {
  const double hx = profile.h_at(x);
  const BoxIndexer idx = profile.table.indexer();
  double best = hx;
  for (std::size_t i = 0; i < profile.h.size(); ++i) {
    if (profile.h[i] > hx) continue;
    const Point w = idx.unflatten(i);
    // The sublevel set must not touch the table edge, otherwise unseen
    // neighbours outside the table could carry the sup.
    for (const Point& y : neighbors(w)) {
      if (!idx.contains(y)) {
        throw std::out_of_range(
            "h_star: sublevel set of h(x) reaches the table boundary; "
            "enlarge the table");
      }
      best = std::max(best, profile.h[idx.flatten(y)]);
    }
  }
  return best;
}

namespace {

std::vector<double> integration_breakpoints(const EnvelopePair& env, double H) {
  std::vector<double> cuts;
  if (env.d >= 3) {
    // Panel per decade of u = h_inf - s keeps the blow-up tame.
    const double u_hi = env.h_inf;
    double u = std::max(env.h_inf - H, 1e-12);
    while (u < u_hi) {
      cuts.push_back(env.h_inf - u);
      u *= 10.0;
    }
  }
  if (env.floor_cross > 0.0 && env.floor_cross < H) cuts.push_back(env.floor_cross);
  return cuts;
}

}  // namespace

GradeBounds grade_bounds(const HarmonicProfile& profile,
                         const EnvelopePair& env, const Point& x) {
  if (env.d != profile.d) throw std::invalid_argument("envelope/profile dimension mismatch");
  GradeBounds out;
  out.h = profile.h_at(x);
  out.h_star = h_star(profile, x);
  constexpr double kRelTol = 1e-8;

  if (out.h > 0.0) {
    const auto f_lower = [&](double s) { return 2.0 * s / env.upper(s); };
    out.lower = detail::integrate_panels(f_lower, 0.0, out.h,
                                         integration_breakpoints(env, out.h),
                                         kRelTol);
  }

  const double H = out.h_star;
  if (H > 0.0) {
    const double fe = std::min(env.floor_cross, H);
    if (fe > 0.0) {
      if (!(env.floor_eps > 0.0)) {
        throw NumericError("lower envelope floor is degenerate", env.floor_eps);
      }
      out.upper_floor_part = fe * fe / env.floor_eps;
    }
    const auto f_upper = [&](double s) { return 2.0 * s / env.raw_lower(s); };
    out.upper = out.upper_floor_part +
                detail::integrate_panels(f_upper, fe, H,
                                         integration_breakpoints(env, H),
                                         kRelTol);
  }
  return out;
}

double planar_grade_constant() {
  return 2.0 * kEulerGamma + 3.0 * std::log(2.0) - 1.0;
}

double asymptotic_grade(const Point& x, const HarmonicProfile& profile) {
  if (x.norm() < 2.0) throw std::invalid_argument("asymptotic_grade needs |x| >= 2");
  const double r = x.norm();
  if (profile.d == 2) {
    return 2.0 * r * r * std::log(r) + planar_grade_constant() * r * r;
  }
  if (profile.d >= 3) {
    return profile.omega_d / profile.p_d * std::pow(r, profile.d);
  }
  throw std::invalid_argument("asymptotic_grade is defined for d >= 2");
}

}  // namespace rgrade
