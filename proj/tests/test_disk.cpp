#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "rgrade/bounds.hpp"
#include "rgrade/disk.hpp"
#include "rgrade/harmonic.hpp"
#include "support/oracles.hpp"

using namespace rgrade;

namespace {
const HarmonicProfile& prof2() {
  static HarmonicProfile p = build_profile(potential_kernel(32), Point::zero(2));
  return p;
}
}  // namespace

TEST_CASE("R=1 star graph: boundary sets by hand") {
  const Domain D = disk_points(1.0, 2);
  const BoundarySets sets = boundary_sets(D, prof2());
  CHECK(sets.dD.size() == 4);
  CHECK(sets.d2D.size() == 5);  // the four leaves plus the centre
  CHECK(sets.h1 == 0.0);        // min over d2D is h(0) = 0
  CHECK(sets.B.size() == 5);    // h >= 0 everywhere, so every point qualifies
  CHECK(sets.mu_D == 8);
  CHECK(sets.mu_B == 8);
}

TEST_CASE("R=1 star graph: hitting times, resistance, commute time") {
  const Domain D = disk_points(1.0, 2);
  const DomainField to_origin = solve_hitting_times(D, Point::zero(2));
  CHECK(to_origin.at(Point{1, 0}) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(to_origin.at(Point::zero(2)) == 0.0);

  // Roles swapped: from the centre to a specific leaf.
  const DomainField to_leaf = solve_hitting_times(D, Point{1, 0});
  CHECK(to_leaf.at(Point::zero(2)) == doctest::Approx(7.0).epsilon(1e-8));

  const double reff = effective_resistance(D, Point{1, 0}, Point::zero(2));
  CHECK(reff == doctest::Approx(1.0).epsilon(1e-10));

  // Commute-time identity: 1 + 7 = mu(D) * R = 8.
  CHECK(to_origin.at(Point{1, 0}) + to_leaf.at(Point::zero(2)) ==
        doctest::Approx(8.0 * reff).epsilon(1e-8));
}

TEST_CASE("iterative solver matches the dense oracle up to R = 10") {
  for (double R : {2.0, 5.0, 10.0}) {
    const Domain D = disk_points(R, 2);
    const DomainField field = solve_hitting_times(D, Point::zero(2));
    const auto dense = oracles::hitting_times_dense(D, Point::zero(2));
    const auto pts = D.points();
    double worst = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      worst = std::max(worst, std::abs(field.at(pts[i]) - dense[i]));
    }
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("z never appears in the inner boundary when its neighbours are inside") {
  const Domain D = disk_points(5.0, 2);
  const BoundarySets sets = boundary_sets(D, prof2());
  for (const Point& p : sets.dD) CHECK(p != Point::zero(2));
}

TEST_CASE("B hugs the boundary at R = 20") {
  const Domain D = disk_points(20.0, 2);
  const BoundarySets sets = boundary_sets(D, prof2());
  double min_r = 1e300;
  for (const Point& p : sets.B) min_r = std::min(min_r, p.norm());
  CHECK(min_r >= 20.0 - 4.0);  // |x| = R - O(1)
  CHECK(sets.h1 > 0.0);
}

TEST_CASE("T:No bounds sandwich the exact hitting time at R = 20") {
  const Domain D = disk_points(20.0, 2);
  static const HarmonicProfile prof = build_profile(potential_kernel(28), Point::zero(2));
  static const EnvelopePair env = fit_envelope_2d(prof, 24);
  const DomainField tau = solve_hitting_times(D, Point::zero(2));
  for (const Point x0 : {Point{10, 0}, Point{4, 0}, Point{8, 8}}) {
    const TnoBounds tb = tno_bounds(D, prof, env, x0);
    const double exact = tau.at(x0);
    CHECK(tb.lower <= exact);
    CHECK(exact <= tb.upper);
    CHECK(tb.delta_bound == doctest::Approx(tb.mu_B * tb.resistance).epsilon(1e-12));
  }
  // x0 = z degenerates to zero.
  const TnoBounds zero = tno_bounds(D, prof, env, Point::zero(2));
  CHECK(zero.lower == 0.0);
}

TEST_CASE("R=1 bounds collapse to the commute-time burden") {
  // h1 = 0 kills both integrals; the upper bound is mu(B) * R(e1, 0) = 8,
  // comfortably above the exact hitting time 1.
  static const HarmonicProfile prof = build_profile(potential_kernel(8), Point::zero(2));
  static const EnvelopePair env = fit_envelope_2d(prof, 6);
  const Domain D = disk_points(1.0, 2);
  const TnoBounds tb = tno_bounds(D, prof, env, Point{1, 0});
  CHECK(tb.lower == 0.0);
  CHECK(tb.delta_bound == doctest::Approx(8.0).epsilon(1e-9));
  CHECK(tb.upper == doctest::Approx(8.0).epsilon(1e-9));
  CHECK(solve_hitting_times(D, Point::zero(2)).at(Point{1, 0}) <= tb.upper);
}

TEST_CASE("commute-time identity on growing disks") {
  for (double R : {1.0, 5.0, 10.0}) {
    const Domain D = disk_points(R, 2);
    const Point x0 = R < 2.0 ? Point{1, 0} : Point{static_cast<Coord>(R / 2), 0};
    const Point z = Point::zero(2);
    const double fwd = solve_hitting_times(D, z).at(x0);
    const double bwd = solve_hitting_times(D, x0).at(z);
    const BoundarySets sets = boundary_sets(D, prof2());
    const double reff = effective_resistance(D, x0, z);
    CHECK(std::abs(fwd + bwd - sets.mu_D * reff) / (sets.mu_D * reff) < 1e-6);
  }
}

TEST_CASE("resistance grows like log R along the ladder") {
  double prev = 0.0;
  for (double R : {20.0, 40.0}) {
    const Domain D = disk_points(R, 2);
    const double reff =
        effective_resistance(D, Point{static_cast<Coord>(R / 2), 0}, Point::zero(2));
    CHECK(reff > prev);
    prev = reff;
    // Within a constant of (1/pi) log|x0| (the grid resistance scale).
    const double scale = std::log(R / 2) / M_PI;
    CHECK(reff > scale * 0.8);
    CHECK(reff < scale + 1.5);
  }
}

TEST_CASE("disk report invariants: positivity, mean-value defect, set nesting") {
  static const HarmonicProfile prof = build_profile(potential_kernel(16), Point::zero(2));
  static const EnvelopePair env = fit_envelope_2d(prof, 12);
  const DiskReport rep = make_disk_report(8.0, Point{4, 0}, prof, env);
  const Domain D = disk_points(8.0, 2);

  CHECK(rep.exact_tau.at(Point::zero(2)) == 0.0);
  for (const Point& p : D.points()) {
    if (p.is_origin()) continue;
    const double v = rep.exact_tau.at(p);
    CHECK(v > 0.0);
    // E tau(x) = 1 + average over in-disk neighbours, degrees deg_D.
    double acc = 0.0;
    double deg = 0.0;
    for (const Point& q : neighbors(p)) {
      if (!D.contains(q)) continue;
      deg += 1.0;
      acc += rep.exact_tau.at(q);
    }
    CHECK(std::abs(v - 1.0 - acc / deg) < 1e-8);
  }

  // dD subset of d2D subset of D; B subset of D.
  for (const Point& p : rep.sets.dD) {
    CHECK(std::count(rep.sets.d2D.begin(), rep.sets.d2D.end(), p) == 1);
  }
  for (const Point& p : rep.sets.d2D) CHECK(D.contains(p));
  for (const Point& p : rep.sets.B) CHECK(D.contains(p));
  CHECK(rep.bounds.lower <= rep.exact_at_x0);
  CHECK(rep.exact_at_x0 <= rep.bounds.upper);
}

TEST_CASE("asymptotic prediction scales as R^2 and vanishes at the centre") {
  const double pred20 = asymptotic_disk(Point{10, 0}, 20.0, prof2());
  const double pred40 = asymptotic_disk(Point{10, 0}, 40.0, prof2());
  const double h10 = prof2().h_at(Point{10, 0});
  CHECK(pred20 == doctest::Approx(2.0 * 400.0 * h10 - 100.0).epsilon(1e-12));
  // Doubling R at fixed x0 multiplies the leading term by 4.
  CHECK((pred40 + 100.0) == doctest::Approx(4.0 * (pred20 + 100.0)).epsilon(1e-12));
  CHECK(asymptotic_disk(Point::zero(2), 20.0, prof2()) == 0.0);
}
