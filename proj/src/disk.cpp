#include "rgrade/disk.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include "rgrade/detail/cg.hpp"
#include "rgrade/detail/quadrature.hpp"
#include "rgrade/errors.hpp"

namespace rgrade {

namespace {

// Compact adjacency of a finite domain: neighbour lists index into the
// lexicographic point order; -1 marks a neighbour outside D.
struct DomainGraph {
  BoxIndexer box;
  std::vector<std::int32_t> cell;
  std::vector<Point> points;
  std::vector<std::int32_t> nbr;  // 2d entries per point
  std::vector<double> deg;        // deg_D
  int two_d = 0;

  std::int32_t index_of(const Point& x) const {
    if (!box.contains(x)) return -1;
    return cell[box.flatten(x)];
  }
};

DomainGraph build_graph(const Domain& D) {
  DomainGraph g;
  const int d = D.dim();
  g.two_d = 2 * d;
  g.points = D.points();
  if (g.points.empty()) throw std::invalid_argument("empty domain");
  g.box = BoxIndexer(d, D.kind() == Domain::Kind::Box
                            ? D.box_radius()
                            : static_cast<int>(std::floor(D.disk_radius())));
  g.cell.assign(g.box.size(), -1);
  for (std::size_t i = 0; i < g.points.size(); ++i) {
    g.cell[g.box.flatten(g.points[i])] = static_cast<std::int32_t>(i);
  }
  g.nbr.assign(g.points.size() * static_cast<std::size_t>(g.two_d), -1);
  g.deg.assign(g.points.size(), 0.0);
  for (std::size_t i = 0; i < g.points.size(); ++i) {
    int k = 0;
    for (const Point& y : neighbors(g.points[i])) {
      const std::int32_t j = g.box.contains(y) ? g.cell[g.box.flatten(y)] : -1;
      g.nbr[i * static_cast<std::size_t>(g.two_d) + static_cast<std::size_t>(k)] = j;
      if (j >= 0) g.deg[i] += 1.0;
      ++k;
    }
    if (g.deg[i] == 0.0) {
      throw std::invalid_argument("domain has an isolated point: " + g.points[i].str());
    }
  }
  return g;
}

constexpr double kCgTol = 1e-9;
constexpr std::size_t kCgMaxIters = 200000;

}  // namespace

bool DomainField::covers(const Point& x) const {
  return box.contains(x) && cell[box.flatten(x)] >= 0;
}

double DomainField::at(const Point& x) const {
  if (!covers(x)) throw std::out_of_range("point " + x.str() + " outside domain");
  return values[static_cast<std::size_t>(cell[box.flatten(x)])];
}

BoundarySets boundary_sets(const Domain& D, const HarmonicProfile& profile) {
  const DomainGraph g = build_graph(D);
  BoundarySets out;

  std::vector<std::uint8_t> in_dD(g.points.size(), 0);
  for (std::size_t i = 0; i < g.points.size(); ++i) {
    if (g.deg[i] < g.two_d) {
      in_dD[i] = 1;
      out.dD.push_back(g.points[i]);
    }
  }
  std::vector<std::uint8_t> in_d2D = in_dD;
  for (std::size_t i = 0; i < g.points.size(); ++i) {
    if (in_d2D[i]) continue;
    for (int k = 0; k < g.two_d; ++k) {
      const std::int32_t j = g.nbr[i * static_cast<std::size_t>(g.two_d) + static_cast<std::size_t>(k)];
      if (j >= 0 && in_dD[static_cast<std::size_t>(j)]) {
        in_d2D[i] = 1;
        break;
      }
    }
  }
  double h1 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < g.points.size(); ++i) {
    if (!in_d2D[i]) continue;
    out.d2D.push_back(g.points[i]);
    h1 = std::min(h1, profile.h_at(g.points[i]));
  }
  out.h1 = h1;

  for (std::size_t i = 0; i < g.points.size(); ++i) {
    bool in_B = false;
    for (const Point& y : neighbors(g.points[i])) {
      if (!profile.covers(y)) {
        throw std::out_of_range(
            "boundary_sets: profile does not cover the one-step "
            "neighbourhood of D");
      }
      if (profile.h_at(y) >= h1) {
        in_B = true;
        break;
      }
    }
    if (in_B) {
      out.B.push_back(g.points[i]);
      out.mu_B += static_cast<std::size_t>(g.deg[i]);
    }
    out.mu_D += static_cast<std::size_t>(g.deg[i]);
  }
  return out;
}

DomainField solve_hitting_times(const Domain& D, const Point& z) {
  const DomainGraph g = build_graph(D);
  const std::int32_t zi = g.index_of(z);
  if (zi < 0) throw std::invalid_argument("target z outside the domain");

  // Unknowns: D minus z. Row x: deg(x) E(x) - sum_{y ~ x, y in D\z} E(y) = deg(x).
  const std::size_t n = g.points.size() - 1;
  std::vector<std::int32_t> compact(g.points.size(), -1);
  std::vector<std::size_t> back(n);
  std::size_t c = 0;
  for (std::size_t i = 0; i < g.points.size(); ++i) {
    if (static_cast<std::int32_t>(i) == zi) continue;
    compact[i] = static_cast<std::int32_t>(c);
    back[c] = i;
    ++c;
  }

  std::vector<double> diag(n), b(n);
  for (std::size_t r = 0; r < n; ++r) {
    diag[r] = g.deg[back[r]];
    b[r] = g.deg[back[r]];
  }
  const auto apply = [&](const std::vector<double>& x, std::vector<double>& y) {
    for (std::size_t r = 0; r < n; ++r) {
      const std::size_t i = back[r];
      double acc = diag[r] * x[r];
      for (int k = 0; k < g.two_d; ++k) {
        const std::int32_t j = g.nbr[i * static_cast<std::size_t>(g.two_d) + static_cast<std::size_t>(k)];
        if (j < 0 || j == zi) continue;
        acc -= x[static_cast<std::size_t>(compact[static_cast<std::size_t>(j)])];
      }
      y[r] = acc;
    }
  };
  const std::vector<double> sol =
      detail::cg_solve(n, apply, b, diag, kCgTol, kCgMaxIters);

  DomainField f;
  f.box = g.box;
  f.cell = g.cell;
  f.points = g.points;
  f.values.assign(g.points.size(), 0.0);
  for (std::size_t r = 0; r < n; ++r) f.values[back[r]] = sol[r];
  return f;
}

double effective_resistance(const Domain& D, const Point& x0, const Point& z) {
  const DomainGraph g = build_graph(D);
  const std::int32_t si = g.index_of(x0);
  const std::int32_t zi = g.index_of(z);
  if (si < 0 || zi < 0) throw std::invalid_argument("x0 or z outside the domain");
  if (si == zi) throw std::invalid_argument("x0 must differ from z");

  // Voltage problem: v(x0) = 1, v(z) = 0, v harmonic elsewhere.
  const std::size_t n = g.points.size() - 2;
  std::vector<std::int32_t> compact(g.points.size(), -1);
  std::vector<std::size_t> back(n);
  std::size_t c = 0;
  for (std::size_t i = 0; i < g.points.size(); ++i) {
    if (static_cast<std::int32_t>(i) == si || static_cast<std::int32_t>(i) == zi) continue;
    compact[i] = static_cast<std::int32_t>(c);
    back[c] = i;
    ++c;
  }

  std::vector<double> diag(n), b(n, 0.0), v;
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t i = back[r];
    diag[r] = g.deg[i];
    for (int k = 0; k < g.two_d; ++k) {
      const std::int32_t j = g.nbr[i * static_cast<std::size_t>(g.two_d) + static_cast<std::size_t>(k)];
      if (j == si) b[r] += 1.0;
    }
  }
  if (n > 0) {
    const auto apply = [&](const std::vector<double>& x, std::vector<double>& y) {
      for (std::size_t r = 0; r < n; ++r) {
        const std::size_t i = back[r];
        double acc = diag[r] * x[r];
        for (int k = 0; k < g.two_d; ++k) {
          const std::int32_t j = g.nbr[i * static_cast<std::size_t>(g.two_d) + static_cast<std::size_t>(k)];
          if (j < 0 || j == si || j == zi) continue;
          acc -= x[static_cast<std::size_t>(compact[static_cast<std::size_t>(j)])];
        }
        y[r] = acc;
      }
    };
    v = detail::cg_solve(n, apply, b, diag, kCgTol, kCgMaxIters);
  }

  double current = 0.0;
  for (int k = 0; k < g.two_d; ++k) {
    const std::int32_t j =
        g.nbr[static_cast<std::size_t>(si) * static_cast<std::size_t>(g.two_d) + static_cast<std::size_t>(k)];
    if (j < 0) continue;
    double vj = 0.0;
    if (j == si) vj = 1.0;
    else if (j != zi) vj = v[static_cast<std::size_t>(compact[static_cast<std::size_t>(j)])];
    current += 1.0 - vj;
  }
  if (!(current > 0.0)) {
    throw NumericError("resistance solve produced nonpositive current", current);
  }
  return 1.0 / current;
}

TnoBounds tno_bounds(const Domain& D, const HarmonicProfile& profile,
                     const EnvelopePair& env, const Point& x0) {
  TnoBounds out;
  const BoundarySets sets = boundary_sets(D, profile);
  out.h1 = sets.h1;
  out.mu_B = sets.mu_B;
  out.mu_D = sets.mu_D;
  out.h_x0 = profile.h_at(x0);
  if (x0.is_origin()) return out;  // E tau = 0; everything degenerates to 0

  out.resistance = effective_resistance(D, x0, Point::zero(D.dim()));
  out.delta_bound = static_cast<double>(sets.mu_B) * out.resistance;

  if (sets.h1 > 0.0) {
    constexpr double kRelTol = 1e-8;
    std::vector<double> cuts;
    if (out.h_x0 < sets.h1) cuts.push_back(out.h_x0);  // kink of u ^ h(x0)
    if (env.floor_cross > 0.0 && env.floor_cross < sets.h1) cuts.push_back(env.floor_cross);
    const auto wedge = [&](double u) { return std::min(u, out.h_x0); };
    const auto f_lo = [&](double u) { return 2.0 * wedge(u) / env.upper(u); };
    const auto f_hi = [&](double u) { return 2.0 * wedge(u) / env.lower(u); };
    out.lower = detail::integrate_panels(f_lo, 0.0, sets.h1, cuts, kRelTol);
    out.upper = detail::integrate_panels(f_hi, 0.0, sets.h1, cuts, kRelTol);
  }
  out.upper += out.delta_bound;
  return out;
}

double asymptotic_disk(const Point& x0, double R, const HarmonicProfile& profile) {
  if (x0.norm() > R) throw std::invalid_argument("x0 must lie in the disk");
  return 2.0 * R * R * profile.h_at(x0) - static_cast<double>(x0.norm_sq());
}

DiskReport make_disk_report(double R, const Point& x0,
                            const HarmonicProfile& profile,
                            const EnvelopePair& env) {
  const Domain D = disk_points(R, 2);
  DiskReport rep;
  rep.R = R;
  rep.x0 = x0;
  rep.exact_tau = solve_hitting_times(D, Point::zero(2));
  rep.sets = boundary_sets(D, profile);
  rep.bounds = tno_bounds(D, profile, env, x0);
  rep.exact_at_x0 = rep.exact_tau.at(x0);
  rep.prediction = asymptotic_disk(x0, R, profile);
  return rep;
}

}  // namespace rgrade
