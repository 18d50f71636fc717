#include "rgrade/grade.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "rgrade/errors.hpp"

namespace rgrade {

namespace {

// Gauss-Seidel engine on the padded box. The pad ring holds +inf so that
// min(W, g) evaluates to g there: stepping out of the box is a forced
// restart. Sweeps alternate forward/backward over a fixed lexicographic
// order, which keeps every solve bitwise reproducible.
class BellmanEngine {
 public:
  BellmanEngine(int d, int L, const Point& x0)
      : d_(d), L_(L), inv2d_(0.5L / static_cast<long double>(d)) {
    side_ = 2 * static_cast<std::int64_t>(L) + 3;  // pad ring of one cell
    std::size_t n = 1;
    for (int i = 0; i < d; ++i) n *= static_cast<std::size_t>(side_);
    W_.assign(n, std::numeric_limits<double>::infinity());

    std::ptrdiff_t stride = 1;
    for (int a = d - 1; a >= 0; --a) {
      offs_[static_cast<std::size_t>(2 * a)] = stride;
      offs_[static_cast<std::size_t>(2 * a + 1)] = -stride;
      stride *= side_;
    }

    const BoxIndexer inner(d, L);
    order_.reserve(inner.size());
    z_lin_ = lin(Point::zero(d));
    for (std::size_t i = 0; i < inner.size(); ++i) {
      const Point p = inner.unflatten(i);
      const std::size_t l = lin(p);
      W_[l] = 0.0;
      if (l != z_lin_) order_.push_back(l);
    }
    x0_lin_ = lin(x0);
  }

  std::size_t lin(const Point& p) const {
    std::size_t idx = 0;
    for (int i = 0; i < d_; ++i) {
      idx = idx * static_cast<std::size_t>(side_) +
            static_cast<std::size_t>(p[i] + L_ + 1);
    }
    return idx;
  }

  double w_at_x0() const { return W_[x0_lin_]; }

  // Relax to the fixed point for this g; returns W(x0). Warm-starts from
  // whatever state the previous call left behind.
  double solve(double g, double vi_tol, std::uint64_t max_sweeps) {
    const int nb = 2 * d_;
    std::uint64_t pass = 0;
    while (true) {
      double delta = 0.0;
      // forward
      for (const std::size_t i : order_) {
        long double acc = 0.0L;
        for (int k = 0; k < nb; ++k) {
          acc += std::min(W_[i + static_cast<std::size_t>(offs_[static_cast<std::size_t>(k)])],
                          g);
        }
        const double v = static_cast<double>(1.0L + acc * inv2d_);
        delta = std::max(delta, std::abs(v - W_[i]));
        W_[i] = v;
      }
      // backward
      for (auto it = order_.rbegin(); it != order_.rend(); ++it) {
        const std::size_t i = *it;
        long double acc = 0.0L;
        for (int k = 0; k < nb; ++k) {
          acc += std::min(W_[i + static_cast<std::size_t>(offs_[static_cast<std::size_t>(k)])],
                          g);
        }
        const double v = static_cast<double>(1.0L + acc * inv2d_);
        delta = std::max(delta, std::abs(v - W_[i]));
        W_[i] = v;
      }
      sweeps_ += 2;
      ++pass;
      if (delta <= vi_tol || (pass & 0x1f) == 0) {
        if (residual(g) <= vi_tol) return W_[x0_lin_];
      }
      if (2 * pass > max_sweeps) {
        throw NumericError(
            "value iteration failed to converge within the sweep budget",
            residual(g));
      }
    }
  }

  double residual(double g) const {
    const int nb = 2 * d_;
    double worst = 0.0;
    for (const std::size_t i : order_) {
      long double acc = 0.0L;
      for (int k = 0; k < nb; ++k) {
        acc += std::min(W_[i + static_cast<std::size_t>(offs_[static_cast<std::size_t>(k)])],
                        g);
      }
      const double v = static_cast<double>(1.0L + acc * inv2d_);
      worst = std::max(worst, std::abs(v - W_[i]));
    }
    return worst;
  }

  ValueField field() const {
    ValueField f{BoxIndexer(d_, L_), {}};
    f.values.resize(f.idx.size());
    for (std::size_t i = 0; i < f.values.size(); ++i) {
      f.values[i] = W_[lin(f.idx.unflatten(i))];
    }
    return f;
  }

  std::uint64_t sweeps() const { return sweeps_; }

 private:
  int d_;
  int L_;
  long double inv2d_;
  std::int64_t side_ = 0;
  std::vector<double> W_;
  std::vector<std::size_t> order_;
  std::array<std::ptrdiff_t, 2 * kMaxDim> offs_{};
  std::size_t z_lin_ = 0;
  std::size_t x0_lin_ = 0;
  std::uint64_t sweeps_ = 0;
};

void validate(const RestartProblem& p, int L) {
  if (p.x0.dim() != p.d) throw std::invalid_argument("x0 dimension mismatch");
  if (p.x0.is_origin()) throw std::invalid_argument("x0 must differ from the target");
  if (!BoxIndexer(p.d, L).contains(p.x0)) {
    throw std::invalid_argument("x0 outside the truncation box");
  }
  if (!(p.vi_tol > 0.0) || !(p.bis_tol > 0.0)) {
    throw std::invalid_argument("tolerances must be positive");
  }
}

}  // namespace

int RestartProblem::resolved_L() const {
  const int min_L =
      std::max(2, 2 * static_cast<int>(std::ceil(x0.norm())));
  if (L == 0) return min_L;
  if (L < min_L) {
    std::fprintf(stderr,
                 "rgrade: warning: truncation box L=%d below the default "
                 "2|x0|=%d; the grade may be noticeably overestimated\n",
                 L, min_L);
  }
  return L;
}

ValueField restart_value_iteration(const RestartProblem& problem, double g) {
  if (!(g >= 0.0)) throw std::invalid_argument("g must be nonnegative");
  const int L = problem.resolved_L();
  validate(problem, L);
  BellmanEngine engine(problem.d, L, problem.x0);
  engine.solve(g, problem.vi_tol, problem.max_sweeps);
  return engine.field();
}

GradeSolution solve_grade(const RestartProblem& problem) {
  const int L = problem.resolved_L();
  validate(problem, L);
  BellmanEngine engine(problem.d, L, problem.x0);

  int evals = 0;
  const auto phi = [&](double g) {
    ++evals;
    return engine.solve(g, problem.vi_tol, problem.max_sweeps) - g;
  };
  // The coarse phase only consumes the sign of phi, which survives a much
  // looser relaxation; the fine phase re-solves to full tolerance.
  const auto phi_coarse = [&](double g) {
    ++evals;
    const double tol = std::max(problem.vi_tol, 1e-7 * std::max(1.0, g));
    return engine.solve(g, tol, problem.max_sweeps) - g;
  };

  // Bracket: phi(0) = W_0(x0) > 0; grow the upper end geometrically until
  // phi < 0. Growth evaluations at small g are cheap (small active region),
  // so this beats starting from the integral bound; the bound, when
  // available, caps the growth since 2x the upper integral is a guaranteed
  // bracket.
  double hi_cap = problem.upper_hint ? std::max(1.0, 2.0 * *problem.upper_hint)
                                     : std::numeric_limits<double>::infinity();
  double lo = 0.0;
  double phi_lo = phi_coarse(0.0);
  double hi = std::min(1.0, hi_cap);
  double phi_hi = phi_coarse(hi);
  int growth = 0;
  while (phi_hi > 0.0) {
    if (++growth > 70) {
      throw NumericError("failed to bracket the grade (upper bound ran away)", phi_hi);
    }
    lo = hi;
    phi_lo = phi_hi;
    if (hi >= hi_cap) hi_cap = std::numeric_limits<double>::infinity();
    hi = std::min(hi * 2.0, hi_cap);
    phi_hi = phi_coarse(hi);
  }

  // Coarse bisection first, so the expensive early solves halve the
  // bracket quickly.
  while (hi - lo > std::max(1.0, 0.02 * (lo + hi))) {
    const double mid = 0.5 * (lo + hi);
    const double pm = phi_coarse(mid);
    if (pm > 0.0) {
      lo = mid;
      phi_lo = pm;
    } else {
      hi = mid;
      phi_hi = pm;
    }
  }
  // Re-anchor the bracket ordinates at full tolerance before the fine phase.
  phi_lo = phi(lo);
  phi_hi = phi(hi);
  if (phi_lo < 0.0) {  // coarse sign was wrong only if the root sits at lo-
    lo = 0.0;
    phi_lo = phi(0.0);
  }
  if (phi_hi > 0.0) {
    while (phi_hi > 0.0 && ++growth <= 70) {
      hi *= 2.0;
      phi_hi = phi(hi);
    }
  }

  // phi is piecewise affine, concave, and decreasing in g, so Illinois
  // regula falsi closes the bracket superlinearly.
  double g_best = (std::abs(phi_lo) <= std::abs(phi_hi)) ? lo : hi;
  double w_lo = phi_lo, w_hi = phi_hi;  // Illinois-damped ordinates
  int keep_side = 0;
  for (int k = 0; k < 80; ++k) {
    if (hi - lo <= problem.bis_tol * std::max(1.0, 0.5 * (hi + lo)) && k >= 2) break;
    const double denom = w_hi - w_lo;
    double s = (denom != 0.0) ? lo - w_lo * (hi - lo) / denom : 0.5 * (lo + hi);
    if (!(s > lo) || !(s < hi)) s = 0.5 * (lo + hi);
    const double ps = phi(s);
    g_best = s;
    if (ps == 0.0) break;
    if (ps > 0.0) {
      lo = s;
      phi_lo = w_lo = ps;
      if (keep_side == +1) w_hi *= 0.5;
      keep_side = +1;
    } else {
      hi = s;
      phi_hi = w_hi = ps;
      if (keep_side == -1) w_lo *= 0.5;
      keep_side = -1;
    }
    if (!(hi - lo > 0.0)) break;
  }

  // Final polish with the true ordinates: inside one affine piece the
  // secant step is exact up to value-iteration noise, and kinks right next
  // to the root still contract at secant rate.
  for (int k = 0; k < 8 && hi > lo; ++k) {
    const double denom = phi_hi - phi_lo;
    double s = (denom != 0.0) ? lo - phi_lo * (hi - lo) / denom
                              : 0.5 * (lo + hi);
    if (!(s > lo) || !(s < hi)) s = 0.5 * (lo + hi);
    const double ps = phi(s);
    g_best = s;
    if (ps == 0.0) break;
    if (ps > 0.0) {
      lo = s;
      phi_lo = ps;
    } else {
      hi = s;
      phi_hi = ps;
    }
  }

  // Final synchronized solve so the reported field is W at g*.
  engine.solve(g_best, problem.vi_tol, problem.max_sweeps);

  GradeSolution sol;
  sol.d = problem.d;
  sol.L = L;
  sol.x0 = problem.x0;
  sol.g_star = g_best;
  sol.W = engine.field();
  sol.bellman_residual = engine.residual(g_best);
  sol.tie_tol_abs = problem.tie_tol * std::max(1.0, g_best);
  sol.bisection_iterations = evals;
  sol.value_sweeps = engine.sweeps();
  return sol;
}

std::vector<Point> extract_strategy(const GradeSolution& sol) {
  std::vector<Point> out;
  const double cut = sol.g_star + sol.tie_tol_abs;
  for (std::size_t i = 0; i < sol.W.values.size(); ++i) {
    if (sol.W.values[i] > cut) out.push_back(sol.W.idx.unflatten(i));
  }
  return out;
}

std::pair<double, double> threshold_gap(const GradeSolution& sol) {
  const double cut = sol.g_star + sol.tie_tol_abs;
  const double r0 = sol.x0.norm();
  double c_out = 0.0;
  double c_in = 0.0;
  for (std::size_t i = 0; i < sol.W.values.size(); ++i) {
    const double r = sol.W.idx.unflatten(i).norm();
    if (sol.W.values[i] > cut) {
      c_in = std::max(c_in, r0 - r);
    } else if (r > r0) {
      c_out = std::max(c_out, r - r0);
    }
  }
  return {c_out, c_in};
}

}  // namespace rgrade
