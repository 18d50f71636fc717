#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rgrade/lattice.hpp"

namespace rgrade {

// Grade computation with target z = origin: translate beforehand if needed.
struct RestartProblem {
  int d = 2;
  Point x0;
  int L = 0;  // 0 selects the default 2*ceil(|x0|); smaller values warn
  double vi_tol = 1e-10;   // sup-norm Bellman residual for value iteration
  double bis_tol = 1e-9;   // bisection bracket width, relative to max(1, g)
  double tie_tol = 1e-7;   // restart-set tie tolerance, relative to max(1, g*)
  std::optional<double> upper_hint;  // e.g. the integral upper bound
  std::uint64_t max_sweeps = 2'000'000;

  int resolved_L() const;
};

// Value function on the truncated box, W(z) = 0.
struct ValueField {
  BoxIndexer idx;
  std::vector<double> values;
  double at(const Point& x) const { return values[idx.flatten(x)]; }
};

// Fixed point of W(y) = 1 + (1/2d) sum over neighbours of min(W, g) for y in
// the box minus the target, with out-of-box neighbours contributing g
// (forced restart) and W(z) = 0.
ValueField restart_value_iteration(const RestartProblem& problem, double g);

struct GradeSolution {
  int d = 2;
  int L = 0;
  Point x0;
  double g_star = 0.0;
  ValueField W;
  double bellman_residual = 0.0;
  double tie_tol_abs = 0.0;
  int bisection_iterations = 0;
  std::uint64_t value_sweeps = 0;

  double W_at(const Point& x) const { return W.at(x); }
};

// The grade g* = gamma(x0, 0) on the truncated problem: the unique g with
// W_g(x0) = g, located by bisection on g -> W_g(x0) - g (decreasing) and
// polished by safeguarded secant steps, since W_g(x0) is piecewise affine
// in g.
GradeSolution solve_grade(const RestartProblem& problem);

// Positions the optimal strategy restarts from: {y : W(y) > g* + tie}.
// Ties are not restarted; either choice is optimal.
std::vector<Point> extract_strategy(const GradeSolution& sol);

// (C_out, C_in): the largest overshoot |y| - |x0| NOT restarted, and the
// deepest restarted undershoot |x0| - |y|; both clamped at zero. The restart
// set then contains {|y| > |x0| + C_out} and excludes {|y| < |x0| - C_in}.
std::pair<double, double> threshold_gap(const GradeSolution& sol);

}  // namespace rgrade
