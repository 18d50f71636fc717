#pragma once

#include <string>
#include <vector>

#include "rgrade/lattice.hpp"

namespace rgrade {

enum class TableKind { PotentialKernel, Green };

std::string table_kind_name(TableKind k);

// Cached values of a discrete harmonic potential on the box {|x_i| <= L}^d:
// the potential kernel a(x) (d = 1 or 2) or the Green function G(x) (d >= 3).
struct PotentialTable {
  int d = 2;
  TableKind kind = TableKind::PotentialKernel;
  int L = 0;
  std::vector<double> values;  // BoxIndexer(d, L) order
  std::string method;
  double accuracy = 0.0;

  BoxIndexer indexer() const { return BoxIndexer(d, L); }
  bool covers(const Point& x) const { return indexer().contains(x); }
  double at(const Point& x) const;

  // Max discrete mean-value defect: |avg over neighbours - value| at
  // interior x != 0, and |defining defect - 1| at the origin.
  double mean_value_residual() const;
};

// Potential kernel of simple random walk on Z^2 on the box of radius L.
// Seeds the diagonal with a(n,n) = (4/pi) * sum_{k<=n} 1/(2k-1), fills the
// octant with the rearranged mean-value relation, and unfolds by symmetry.
// The fill runs in extended precision so the rounded table is exact to
// double rounding.
PotentialTable potential_kernel(int L);

// Potential kernel of simple random walk on Z (a(x) = |x|), provided so the
// d = 1 bound machinery runs through the same interfaces.
PotentialTable line_kernel(int L);

// Green function of simple random walk on Z^d, 3 <= d <= 5, on the box of
// radius L. Discrete Poisson solve on the box of radius 3L with Dirichlet
// data a_d |x|^(2-d); the accuracy estimate comes from re-solving on the
// half-size box and differencing on the reported table.
PotentialTable green_table(int L, int d);

// Euler-Mascheroni constant (analytically specified input).
inline constexpr double kEulerGamma = 0.5772156649015329;

// Volume of the unit ball in R^d.
double unit_ball_volume(int d);

// The harmonic function h used by the bound machinery, together with the
// constants that appear in the asymptotic statements.
struct HarmonicProfile {
  PotentialTable table;
  std::vector<double> h;  // same indexing as table
  int d = 2;
  int L = 0;

  double b = 0.0;        // gamma_e + (3/2) log 2 (d = 2)
  double omega_d = 0.0;  // volume of the unit ball
  double a_d = 0.0;      // 2 / ((d-2) omega_d), d >= 3
  double p_d = 0.0;      // escape probability 1/G(0), d >= 3
  double h_inf = 0.0;    // a_d^{-1} G(0) for d >= 3, +inf otherwise

  bool covers(const Point& x) const { return table.covers(x); }
  double h_at(const Point& x) const;
};

// h from a potential table, target z = origin (translation is the caller's
// business). d=1: h = a; d=2: h = (pi/2) a; d>=3: h = a_d^{-1}(G(0) - G).
HarmonicProfile build_profile(const PotentialTable& table, const Point& z);

// Local variance V_h(x) = (1/2d) sum over neighbours of (h(y) - h(x))^2.
double local_variance(const HarmonicProfile& profile, const Point& x);

}  // namespace rgrade
