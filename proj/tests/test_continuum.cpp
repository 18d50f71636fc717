#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "rgrade/continuum.hpp"
#include "rgrade/grade.hpp"

using namespace rgrade;

TEST_CASE("bm_h piecewise forms") {
  CHECK(bm_h(1.0, {2, 1.0}) == 0.0);
  CHECK(bm_h(3.0, {1, 1.0}) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(bm_h(2.0, {3, 1.0}) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS(bm_h(0.5, BmProblem{2, 1.0}), std::invalid_argument);
}

TEST_CASE("bm_gradient_sq piecewise forms") {
  CHECK(bm_gradient_sq(7.0, {1, 1.0}) == 1.0);
  CHECK(bm_gradient_sq(10.0, {2, 1.0}) == doctest::Approx(0.01).epsilon(1e-15));
  CHECK(bm_gradient_sq(2.0, {3, 1.0}) == doctest::Approx(0.0625).epsilon(1e-15));
}

TEST_CASE("bm_grade closed forms") {
  CHECK(bm_grade(3.0, {1, 1.0}) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(bm_grade(1.0, {2, 1.0}) == 0.0);
  CHECK(bm_grade(2.0, {3, 1.0}) == doctest::Approx(5.0 / 3.0).epsilon(1e-14));
  // r0 = 0 only in d = 1.
  CHECK(bm_grade(3.0, {1, 0.0}) == doctest::Approx(9.0).epsilon(1e-15));
  CHECK_THROWS_AS(bm_grade(1.0, BmProblem{2, 0.0}), std::invalid_argument);
}

TEST_CASE("boundary zero is exact for every d, r0") {
  for (int d = 1; d <= 6; ++d) {
    for (double r0 : {0.25, 1.0, 3.5}) {
      CHECK(bm_grade(r0, {d, r0}) == 0.0);
    }
  }
}

TEST_CASE("closed form equals the integral route to 1e-10 relative") {
  for (int d = 1; d <= 5; ++d) {
    for (double r0 : {0.5, 1.0, 2.0}) {
      for (double mult : {1.5, 2.0, 5.0, 11.0}) {
        const BmProblem p{d, r0};
        const double closed = bm_grade(mult * r0, p);
        const double integral = bm_grade_integral(mult * r0, p);
        CHECK(std::abs(closed - integral) <= 1e-10 * closed);
      }
    }
  }
}

TEST_CASE("d=1 lattice limit: gamma_Z(n)/n^2 -> 1 at rate 1/n") {
  for (int n : {1, 2, 5, 10, 25}) {
    RestartProblem p;
    p.d = 1;
    p.x0 = Point{static_cast<Coord>(n)};
    p.vi_tol = 1e-12;
    const double g = solve_grade(p).g_star;
    CHECK(std::abs(g / (static_cast<double>(n) * n) - 1.0) <= 1.0 / n + 1e-7);
  }
}
