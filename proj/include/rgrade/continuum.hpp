#pragma once

namespace rgrade {

// Brownian motion in R^d restarted at |x|, target ball of radius r0.
// r0 = 0 is admissible only for d = 1.
struct BmProblem {
  int d = 1;
  double r0 = 1.0;

  void validate() const;
};

// h(x): |x| - r0 (d=1), log(|x|/r0) (d=2), r0^{2-d} - |x|^{2-d} (d>=3).
double bm_h(double r, const BmProblem& problem);

// |grad h|^2: 1 (d=1), |x|^{-2} (d=2), (d-2)^2 |x|^{2-2d} (d>=3).
double bm_gradient_sq(double r, const BmProblem& problem);

// Closed-form grade of the restarted Brownian motion.
double bm_grade(double r, const BmProblem& problem);

// The same grade through the integral of 2s/g(s) up to h(|x|), evaluated by
// quadrature; agrees with the closed form to ~1e-12 relative.
double bm_grade_integral(double r, const BmProblem& problem);

}  // namespace rgrade
