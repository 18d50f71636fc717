#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "rgrade/errors.hpp"

namespace rgrade::detail {

template <class F>
double simpson_step(F&& f, double a, double b, double fa, double fm, double fb) {
  (void)f;
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

template <class F>
double simpson_rec(F&& f, double a, double m, double b, double fa, double fm,
                   double fb, double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson_step(f, a, m, fa, flm, fm);
  const double right = simpson_step(f, m, b, fm, frm, fb);
  const double delta = left + right - whole;
  if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  if (depth <= 0) {
    throw NumericError("adaptive Simpson quadrature failed to converge",
                       std::abs(delta));
  }
  return simpson_rec(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

// Adaptive Simpson on [a,b] with absolute tolerance.
template <class F>
double integrate_abs(F&& f, double a, double b, double abs_tol, int max_depth = 48) {
  if (!(b > a)) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a);
  const double fm = f(m);
  const double fb = f(b);
  const double whole = simpson_step(f, a, b, fa, fm, fb);
  return simpson_rec(f, a, m, b, fa, fm, fb, whole, abs_tol, max_depth);
}

// Adaptive Simpson over a panel decomposition. Breakpoints inside (a,b)
// split the interval wherever the integrand has a kink or changes scale;
// the relative tolerance applies to the total integral.
template <class F>
double integrate_panels(F&& f, double a, double b,
                        const std::vector<double>& breakpoints,
                        double rel_tol) {
  if (!(b > a)) return 0.0;
  std::vector<double> cuts;
  cuts.push_back(a);
  for (double c : breakpoints) {
    if (c > a && c < b) cuts.push_back(c);
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  // Coarse pass to size the absolute tolerance per panel.
  double rough = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double x0 = cuts[i], x1 = cuts[i + 1];
    rough += std::abs(simpson_step(f, x0, x1, f(x0), f(0.5 * (x0 + x1)), f(x1)));
  }
  const double abs_tol =
      std::max(rel_tol * std::max(rough, 1e-300), 1e-300) /
      static_cast<double>(cuts.size() - 1);

  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    total += integrate_abs(f, cuts[i], cuts[i + 1], abs_tol);
  }
  return total;
}

template <class F>
double integrate(F&& f, double a, double b, double rel_tol) {
  return integrate_panels(f, a, b, {}, rel_tol);
}

}  // namespace rgrade::detail
