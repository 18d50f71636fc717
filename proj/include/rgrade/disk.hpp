#pragma once

#include <vector>

#include "rgrade/bounds.hpp"
#include "rgrade/harmonic.hpp"
#include "rgrade/lattice.hpp"

namespace rgrade {

// Scalar field over the points of a finite domain, in lexicographic order.
struct DomainField {
  BoxIndexer box;                     // bounding box of the domain
  std::vector<std::int32_t> cell;     // box-flat -> compact index, -1 outside
  std::vector<Point> points;          // compact order (lexicographic)
  std::vector<double> values;

  bool covers(const Point& x) const;
  double at(const Point& x) const;
};

struct BoundarySets {
  std::vector<Point> dD;   // inner boundary
  std::vector<Point> d2D;  // two-step inner boundary
  double h1 = 0.0;         // min h over d2D
  std::vector<Point> B;    // {x in D : x ~ y for some y with h(y) >= h1}
  std::size_t mu_B = 0;    // sum of deg_D over B
  std::size_t mu_D = 0;    // sum of deg_D over D (twice the edge count)
};

// Boundary machinery of the finite-domain hitting-time bounds. The profile
// must cover the one-step neighbourhood of D.
BoundarySets boundary_sets(const Domain& D, const HarmonicProfile& profile);

// Expected hitting times of z for simple random walk on D with transition
// probabilities 1/deg_D(x); Jacobi-preconditioned CG to a 1e-9 sup-norm
// mean-value residual.
DomainField solve_hitting_times(const Domain& D, const Point& z);

// Effective resistance between x0 and z with unit edge conductances in D.
double effective_resistance(const Domain& D, const Point& x0, const Point& z);

struct TnoBounds {
  double lower = 0.0;
  double upper = 0.0;        // integral part + delta bound
  double delta_bound = 0.0;  // mu(B) * R(x0 <-> z)
  double h1 = 0.0;
  double h_x0 = 0.0;
  std::size_t mu_B = 0;
  std::size_t mu_D = 0;
  double resistance = 0.0;
};

// Bounds on E_x0 tau: integral 0..h1 of 2(u ^ h(x0))/g+- du, the upper side
// augmented by the commute-time estimate of the near-boundary burden.
TnoBounds tno_bounds(const Domain& D, const HarmonicProfile& profile,
                     const EnvelopePair& env, const Point& x0);

// Second-order prediction 2 R^2 h(x0) - |x0|^2 for the disk of radius R.
double asymptotic_disk(const Point& x0, double R, const HarmonicProfile& profile);

// Everything the disk machinery produces for one (R, x0) instance.
struct DiskReport {
  double R = 0.0;
  Point x0;
  DomainField exact_tau;
  BoundarySets sets;
  TnoBounds bounds;
  double exact_at_x0 = 0.0;
  double prediction = 0.0;
};

DiskReport make_disk_report(double R, const Point& x0,
                            const HarmonicProfile& profile,
                            const EnvelopePair& env);

}  // namespace rgrade
