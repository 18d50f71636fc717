#include "rgrade/continuum.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "rgrade/detail/quadrature.hpp"

namespace rgrade {

namespace {

void check_radius(double r, const BmProblem& p) {
  p.validate();
  if (!(r >= p.r0)) {
    throw std::invalid_argument("|x| = " + std::to_string(r) +
                                " is inside the target ball of radius " +
                                std::to_string(p.r0));
  }
}

}  // namespace

void BmProblem::validate() const {
  if (d < 1) throw std::invalid_argument("dimension must be >= 1");
  if (d == 1) {
    if (!(r0 >= 0.0)) throw std::invalid_argument("r0 must be nonnegative");
  } else if (!(r0 > 0.0)) {
    throw std::invalid_argument("r0 must be positive for d >= 2");
  }
}

double bm_h(double r, const BmProblem& p) {
  check_radius(r, p);
  if (p.d == 1) return r - p.r0;
  if (p.d == 2) return std::log(r / p.r0);
  return std::pow(p.r0, 2.0 - p.d) - std::pow(r, 2.0 - p.d);
}

double bm_gradient_sq(double r, const BmProblem& p) {
  check_radius(r, p);
  if (p.d == 1) return 1.0;
  if (p.d == 2) return 1.0 / (r * r);
  const double c = static_cast<double>(p.d) - 2.0;
  return c * c * std::pow(r, 2.0 - 2.0 * p.d);
}

double bm_grade(double r, const BmProblem& p) {
  check_radius(r, p);
  if (r == p.r0) return 0.0;  // boundary zero, exactly
  if (p.d == 1) {
    const double t = r - p.r0;
    return t * t;
  }
  if (p.d == 2) {
    return r * r * std::log(r) - r * r * (0.5 + std::log(p.r0)) +
           0.5 * p.r0 * p.r0;
  }
  const double d = static_cast<double>(p.d);
  return 2.0 * std::pow(p.r0, 2.0 - d) / (d * (d - 2.0)) * std::pow(r, d) -
         r * r / (d - 2.0) + p.r0 * p.r0 / d;
}

double bm_grade_integral(double r, const BmProblem& p) {
  check_radius(r, p);
  const double H = bm_h(r, p);
  if (H <= 0.0) return 0.0;

  // g(s) = |grad h|^2 expressed through s: invert h(radius) = s.
  const auto g_of_s = [&](double s) {
    if (p.d == 1) return 1.0;
    if (p.d == 2) {
      const double rad = p.r0 * std::exp(s);
      return 1.0 / (rad * rad);
    }
    const double d = static_cast<double>(p.d);
    const double c = d - 2.0;
    const double u = std::pow(p.r0, 2.0 - d) - s;  // = radius^{2-d}
    return c * c * std::pow(u, (2.0 * d - 2.0) / (d - 2.0));
  };
  const auto f = [&](double s) { return 2.0 * s / g_of_s(s); };
  return detail::integrate(f, 0.0, H, 1e-12);
}

}  // namespace rgrade
