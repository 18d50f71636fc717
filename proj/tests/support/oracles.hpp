#pragma once

// Independent oracles used only by tests: a Fourier-integral evaluation of
// the planar potential kernel, a Monte Carlo estimate of the d=3 Green
// function at the origin, and a dense direct solver for small hitting-time
// systems. None of them share code with the library paths they check.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "rgrade/lattice.hpp"
#include "rgrade/rng.hpp"

namespace oracles {

// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration on the
// Legendre recurrence.
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(static_cast<std::size_t>(n), 0.0);
  w.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double dp = n * (t * p1 - p0) / (t * t - 1.0);
      const double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) {
        x[static_cast<std::size_t>(i)] = t;
        w[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - t * t) * dp * dp);
        break;
      }
    }
  }
}

// a(x) = (2pi)^-2 int over [-pi,pi]^2 of (1 - cos(x.theta)) / (1 - psi(theta)),
// psi(theta) = (cos t1 + cos t2)/2. Integrated in polar coordinates over
// eight octant panels of the square; the integrand is analytic per panel,
// so tensor Gauss-Legendre converges spectrally.
inline double potential_kernel_fourier(std::int64_t x1, std::int64_t x2,
                                       int order = 64) {
  std::vector<double> gx, gw;
  gauss_legendre(order, gx, gw);

  const auto integrand = [&](double t1, double t2) {
    const double denom = 1.0 - 0.5 * (std::cos(t1) + std::cos(t2));
    const double numer =
        1.0 - std::cos(static_cast<double>(x1) * t1 + static_cast<double>(x2) * t2);
    if (denom == 0.0) return 0.0;  // only at the origin, measure zero
    return numer / denom;
  };

  double total = 0.0;
  for (int oct = 0; oct < 8; ++oct) {
    const double phi0 = M_PI / 4.0 * oct;
    const double phi1 = M_PI / 4.0 * (oct + 1);
    for (int i = 0; i < order; ++i) {
      const double phi = 0.5 * (phi0 + phi1) + 0.5 * (phi1 - phi0) * gx[static_cast<std::size_t>(i)];
      const double wphi = 0.5 * (phi1 - phi0) * gw[static_cast<std::size_t>(i)];
      const double rmax =
          M_PI / std::max(std::abs(std::cos(phi)), std::abs(std::sin(phi)));
      for (int j = 0; j < order; ++j) {
        const double r = 0.5 * rmax * (1.0 + gx[static_cast<std::size_t>(j)]);
        const double wr = 0.5 * rmax * gw[static_cast<std::size_t>(j)];
        total += wphi * wr * r * integrand(r * std::cos(phi), r * std::sin(phi));
      }
    }
  }
  return total / (4.0 * M_PI * M_PI);
}

// Monte Carlo estimate of G(0) for simple random walk on Z^3: 1 / (fraction
// of walks that never return within max_steps). Biased low in G by the
// truncation, O(max_steps^-1/2); keep tolerances loose.
inline double green_origin_mc(std::uint64_t walks, std::uint64_t max_steps,
                              std::uint64_t seed) {
  std::uint64_t escaped = 0;
  for (std::uint64_t w = 0; w < walks; ++w) {
    rgrade::SplitMix64 rng = rgrade::SplitMix64::substream(seed, w);
    std::int64_t x = 0, y = 0, z = 0;
    bool returned = false;
    for (std::uint64_t s = 0; s < max_steps; ++s) {
      switch (rng.next_below(6)) {
        case 0: ++x; break;
        case 1: --x; break;
        case 2: ++y; break;
        case 3: --y; break;
        case 4: ++z; break;
        default: --z; break;
      }
      if (x == 0 && y == 0 && z == 0) {
        returned = true;
        break;
      }
    }
    if (!returned) ++escaped;
  }
  if (escaped == 0) throw std::runtime_error("no walk escaped; step budget too small");
  return static_cast<double>(walks) / static_cast<double>(escaped);
}

// Dense Gaussian elimination for E[tau] on a small domain: the independent
// check of the iterative solver.
inline std::vector<double> hitting_times_dense(const rgrade::Domain& D,
                                               const rgrade::Point& z) {
  using rgrade::Point;
  const std::vector<Point> pts = D.points();
  const std::size_t m = pts.size();
  std::size_t zi = m;
  for (std::size_t i = 0; i < m; ++i) {
    if (pts[i] == z) zi = i;
  }
  if (zi == m) throw std::invalid_argument("target outside domain");

  std::vector<std::size_t> unk;  // indices of non-target points
  std::vector<std::ptrdiff_t> col(m, -1);
  for (std::size_t i = 0; i < m; ++i) {
    if (i != zi) {
      col[i] = static_cast<std::ptrdiff_t>(unk.size());
      unk.push_back(i);
    }
  }
  const std::size_t n = unk.size();
  std::vector<double> A(n * n, 0.0), b(n, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    const Point& p = pts[unk[r]];
    double deg = 0.0;
    for (const Point& q : rgrade::neighbors(p)) {
      if (!D.contains(q)) continue;
      deg += 1.0;
      std::size_t qi = m;
      for (std::size_t i = 0; i < m; ++i) {
        if (pts[i] == q) {
          qi = i;
          break;
        }
      }
      if (qi != zi) A[r * n + static_cast<std::size_t>(col[qi])] -= 1.0;
    }
    A[r * n + r] += deg;
    b[r] = deg;
  }

  // Partial-pivot elimination.
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(A[i * n + k]) > std::abs(A[piv * n + k])) piv = i;
    }
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(A[k * n + j], A[piv * n + j]);
      std::swap(b[k], b[piv]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = A[i * n + k] / A[k * n + k];
      if (f == 0.0) continue;
      for (std::size_t j = k; j < n; ++j) A[i * n + j] -= f * A[k * n + j];
      b[i] -= f * b[k];
    }
  }
  std::vector<double> sol(n);
  for (std::size_t k = n; k-- > 0;) {
    double acc = b[k];
    for (std::size_t j = k + 1; j < n; ++j) acc -= A[k * n + j] * sol[j];
    sol[k] = acc / A[k * n + k];
  }

  std::vector<double> out(m, 0.0);
  for (std::size_t r = 0; r < n; ++r) out[unk[r]] = sol[r];
  return out;
}

}  // namespace oracles
