#include <cmath>

#include "doctest.h"
#include "rgrade/errors.hpp"
#include "rgrade/grade.hpp"
#include "rgrade/harmonic.hpp"
#include "rgrade/montecarlo.hpp"

using namespace rgrade;

namespace {
WalkParams params(int d, Point x0, std::uint64_t reps, std::uint64_t seed,
                  std::uint64_t cap = 0) {
  WalkParams wp;
  wp.d = d;
  wp.x0 = x0;
  wp.z = Point::zero(d);
  wp.replicates = reps;
  wp.seed = seed;
  wp.step_cap = cap;
  return wp;
}
}  // namespace

TEST_CASE("geometric example: restart whenever the new point is not 0") {
  // From (1,0), each move hits 0 with probability 1/4; moves ~ Geometric(1/4).
  const auto wp = params(2, Point{1, 0}, 200000, 1234);
  const StrategySpec drastic =
      StrategySpec::custom([](const Point&) { return true; });
  const McEstimate est = simulate_strategy(wp, drastic);
  CHECK(std::abs(est.mean - 4.0) <= 3.0 * est.std_error);
  CHECK(est.censored == 0);
}

TEST_CASE("1D euclidean threshold at rho = 3 reproduces gamma = 12") {
  const auto wp = params(1, Point{3}, 200000, 99);
  const McEstimate est =
      simulate_strategy(wp, StrategySpec::euclidean_threshold(3.0));
  CHECK(std::abs(est.mean - 12.0) <= 3.0 * est.std_error);
}

TEST_CASE("transience shows up as censoring for never-restart in d=3") {
  auto wp = params(3, Point{5, 0, 0}, 400, 7, 20000);
  const McEstimate est = simulate_strategy(wp, StrategySpec::never());
  // Escape probability from |x|=5 is large; most runs never come back.
  CHECK(est.censored > 200);
  CHECK(est.censored + est.replicates == 400);

  wp.step_cap = 10;  // all censored -> unusable
  wp.x0 = Point{15, 0, 0};
  CHECK_THROWS_AS(simulate_strategy(wp, StrategySpec::never()), NumericError);
}

TEST_CASE("seed determinism, thread-count independence, CRN duplication") {
  auto wp = params(2, Point{5, 0}, 20000, 2024);
  const StrategySpec strat = StrategySpec::euclidean_threshold(5.0);
  const McEstimate a = simulate_strategy(wp, strat);
  const McEstimate b = simulate_strategy(wp, strat);
  CHECK(a.mean == b.mean);
  CHECK(a.std_error == b.std_error);

  wp.threads = 4;
  const McEstimate c = simulate_strategy(wp, strat);
  CHECK(a.mean == c.mean);
  CHECK(a.std_error == c.std_error);

  // Identical strategies in a comparison give identical estimates.
  const auto table = compare_strategies(
      wp, {{"first", strat}, {"second", strat}});
  CHECK(table[0].second.mean == table[1].second.mean);
}

TEST_CASE("optimality: no strategy beats the solved grade") {
  RestartProblem p;
  p.d = 2;
  p.x0 = Point{3, 0};
  p.L = 12;
  const GradeSolution sol = solve_grade(p);

  const auto wp = params(2, Point{3, 0}, 50000, 4242);
  const ValueField W = sol.W;
  const double cut = sol.g_star + sol.tie_tol_abs;
  const auto table = compare_strategies(
      wp, {{"optimal", StrategySpec::custom([W, cut](const Point& y) {
              return !W.idx.contains(y) || W.at(y) > cut;
            })},
           {"euclid", StrategySpec::euclidean_threshold(3.0)},
           {"euclid-wide", StrategySpec::euclidean_threshold(5.0)}});
  for (const auto& [name, est] : table) {
    CHECK(est.mean >= sol.g_star - 3.0 * est.std_error);
  }
  // Sorted ascending by mean.
  CHECK(table[0].second.mean <= table[1].second.mean);
  CHECK(table[1].second.mean <= table[2].second.mean);
  // The optimal-set strategy reproduces the grade.
  for (const auto& [name, est] : table) {
    if (name == "optimal") {
      CHECK(std::abs(est.mean - sol.g_star) <= 3.0 * est.std_error);
    }
  }
}

TEST_CASE("h-threshold strategy is near the euclidean one (d=2)") {
  static const HarmonicProfile prof =
      build_profile(potential_kernel(24), Point::zero(2));
  const auto wp = params(2, Point{6, 0}, 50000, 777);
  const McEstimate h_est = simulate_strategy(
      wp, StrategySpec::h_threshold(prof.h_at(Point{6, 0}), prof));
  const McEstimate e_est =
      simulate_strategy(wp, StrategySpec::euclidean_threshold(6.0));
  CHECK(std::abs(h_est.mean - e_est.mean) / e_est.mean < 0.03);
}

TEST_CASE("validation") {
  auto wp = params(2, Point{1, 0}, 0, 1);
  CHECK_THROWS_AS(simulate_strategy(wp, StrategySpec::never()),
                  std::invalid_argument);
  wp.replicates = 10;
  CHECK_THROWS_AS(
      compare_strategies(wp, {{"only", StrategySpec::never()}}),
      std::invalid_argument);
}
