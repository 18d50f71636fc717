#include "rgrade/harmonic.hpp"

#include <fftw3.h>
#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "rgrade/errors.hpp"

namespace rgrade {

namespace {

// --- extended-precision octant fill for the planar potential kernel ------
//
// The mean-value relation solved for the unknown neighbour,
//   a(m+1,n) = 4 a(m,n) - a(m-1,n) - a(m,n+1) - a(m,n-1),
// amplifies rounding by up to 3 + 2*sqrt(2) per column, so the fill runs in
// MPFR with precision scaled to the box radius. Rounded back to double the
// table is then exact to the last bit or two.

class MpColumn {
 public:
  MpColumn(int len, mpfr_prec_t prec) : v_(static_cast<std::size_t>(len)) {
    for (auto& x : v_) mpfr_init2(&x, prec);
  }
  ~MpColumn() {
    for (auto& x : v_) mpfr_clear(&x);
  }
  MpColumn(const MpColumn&) = delete;
  MpColumn& operator=(const MpColumn&) = delete;

  mpfr_ptr operator[](int i) { return &v_[static_cast<std::size_t>(i)]; }

 private:
  std::vector<__mpfr_struct> v_;
};

// Triangular octant a(m,n), 0 <= n <= m <= M, rounded to double.
std::vector<double> mccrea_whipple_octant(int M) {
  const auto tri = [](int m, int n) {
    return static_cast<std::size_t>(m) * (static_cast<std::size_t>(m) + 1) / 2 +
           static_cast<std::size_t>(n);
  };
  std::vector<double> oct(tri(M, M) + 1, 0.0);
  if (M == 0) return oct;

  const mpfr_prec_t prec =
      std::max<mpfr_prec_t>(128, 96 + static_cast<mpfr_prec_t>(std::ceil(2.6 * M)));

  mpfr_t pi, four_over_pi, diag_sum, t, u;
  mpfr_init2(pi, prec);
  mpfr_init2(four_over_pi, prec);
  mpfr_init2(diag_sum, prec);
  mpfr_init2(t, prec);
  mpfr_init2(u, prec);
  mpfr_const_pi(pi, MPFR_RNDN);
  mpfr_ui_div(four_over_pi, 4, pi, MPFR_RNDN);
  mpfr_set_ui(diag_sum, 1, MPFR_RNDN);  // sum_{k<=1} 1/(2k-1)

  MpColumn prev(M + 1, prec), cur(M + 1, prec), nxt(M + 1, prec);

  // Columns 0 and 1: a(0,0) = 0, a(1,0) = 1, a(1,1) = 4/pi.
  mpfr_set_zero(prev[0], 1);
  mpfr_set_ui(cur[0], 1, MPFR_RNDN);
  mpfr_mul(cur[1], four_over_pi, diag_sum, MPFR_RNDN);
  oct[tri(0, 0)] = 0.0;
  oct[tri(1, 0)] = 1.0;
  oct[tri(1, 1)] = mpfr_get_d(cur[1], MPFR_RNDN);

  for (int m = 1; m < M; ++m) {
    // New diagonal value a(m+1,m+1) from the closed form.
    mpfr_set_ui(t, 1, MPFR_RNDN);
    mpfr_div_ui(t, t, static_cast<unsigned long>(2 * (m + 1) - 1), MPFR_RNDN);
    mpfr_add(diag_sum, diag_sum, t, MPFR_RNDN);
    mpfr_mul(nxt[m + 1], four_over_pi, diag_sum, MPFR_RNDN);

    // Subdiagonal from harmonicity at (m,m): a(m+1,m) = 2 a(m,m) - a(m,m-1).
    mpfr_mul_ui(t, cur[m], 2, MPFR_RNDN);
    mpfr_sub(nxt[m], t, cur[m - 1], MPFR_RNDN);

    // Interior rows from harmonicity at (m,n).
    for (int n = m - 1; n >= 1; --n) {
      mpfr_mul_ui(t, cur[n], 4, MPFR_RNDN);
      mpfr_sub(t, t, prev[n], MPFR_RNDN);
      mpfr_sub(t, t, cur[n + 1], MPFR_RNDN);
      mpfr_sub(nxt[n], t, cur[n - 1], MPFR_RNDN);
    }

    // Axis row uses the reflection a(m,-1) = a(m,1).
    mpfr_mul_ui(t, cur[0], 4, MPFR_RNDN);
    mpfr_sub(t, t, prev[0], MPFR_RNDN);
    mpfr_mul_ui(u, cur[1], 2, MPFR_RNDN);
    mpfr_sub(nxt[0], t, u, MPFR_RNDN);

    for (int n = 0; n <= m + 1; ++n) {
      oct[tri(m + 1, n)] = mpfr_get_d(nxt[n], MPFR_RNDN);
      mpfr_swap(prev[n], cur[n]);
      mpfr_swap(cur[n], nxt[n]);
    }
    // Row m+1 of `prev` (i.e. old cur) is not set for n = m+1; copy it so
    // the next iteration's nxt[m+1] computation reads a defined value only
    // where the recursion references it (it never does for n = m+1).
  }

  mpfr_clears(pi, four_over_pi, diag_sum, t, u, static_cast<mpfr_ptr>(nullptr));
  return oct;
}

// --- DST-based Poisson solve for the Green function ----------------------

// Interior values of the solution of
//   2d G(x) - sum_nb G = 2d * delta_0   on {|x|_inf < Rbig},
//   G = a_d |x|^(2-d)                   on {|x|_inf = Rbig}.
// Returned in BoxIndexer(d, Rbig-1) order.
std::vector<double> green_box_solve(int d, int Rbig, double a_d) {
  const int Lint = Rbig - 1;
  const BoxIndexer idx(d, Lint);
  const std::size_t n_cells = idx.size();
  const int n = 2 * Lint + 1;

  const double expo = (2.0 - d) / 2.0;
  const auto lift = [&](const Point& p) {
    const std::int64_t ns = p.norm_sq();
    if (ns == 0) return a_d;  // any finite value works; it cancels in G = u + lift
    return a_d * std::pow(static_cast<double>(ns), expo);
  };

  std::vector<double> lift_v(n_cells);
  for (std::size_t i = 0; i < n_cells; ++i) lift_v[i] = lift(idx.unflatten(i));

  // rhs = 2d delta_0 - A lift, with boundary neighbours evaluated directly
  // from the Dirichlet data (same formula as the lift).
  std::vector<double> work(n_cells);
  const std::size_t origin = idx.flatten(Point::zero(d));
  for (std::size_t i = 0; i < n_cells; ++i) {
    const Point p = idx.unflatten(i);
    double acc = 2.0 * d * lift_v[i];
    for (int a = 0; a < d; ++a) {
      for (int s = -1; s <= 1; s += 2) {
        Point q = p;
        q[a] = p[a] + s;
        acc -= idx.contains(q) ? lift_v[idx.flatten(q)] : lift(q);
      }
    }
    work[i] = -acc;
  }
  work[origin] += 2.0 * d;

  // Diagonalize the Dirichlet Laplacian with DST-I along every axis.
  std::vector<int> dims(static_cast<std::size_t>(d), n);
  std::vector<fftw_r2r_kind> kinds(static_cast<std::size_t>(d), FFTW_RODFT00);
  fftw_plan plan = fftw_plan_r2r(d, dims.data(), work.data(), work.data(),
                                 kinds.data(), FFTW_ESTIMATE);
  if (!plan) throw NumericError("FFTW plan creation failed");
  fftw_execute(plan);

  std::vector<double> eig(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    eig[static_cast<std::size_t>(k)] =
        2.0 - 2.0 * std::cos(M_PI * (k + 1) / (n + 1));
  }
  std::vector<int> odo(static_cast<std::size_t>(d), 0);
  for (std::size_t i = 0; i < n_cells; ++i) {
    double lam = 0.0;
    for (int a = 0; a < d; ++a) lam += eig[static_cast<std::size_t>(odo[static_cast<std::size_t>(a)])];
    work[i] /= lam;
    for (int a = d - 1; a >= 0; --a) {
      if (++odo[static_cast<std::size_t>(a)] < n) break;
      odo[static_cast<std::size_t>(a)] = 0;
    }
  }

  fftw_execute(plan);  // DST-I is its own inverse up to 2(n+1) per axis
  fftw_destroy_plan(plan);

  double scale = 1.0;
  for (int a = 0; a < d; ++a) scale *= 2.0 * (n + 1);
  const double inv_scale = 1.0 / scale;
  for (std::size_t i = 0; i < n_cells; ++i) {
    work[i] = work[i] * inv_scale + lift_v[i];
  }
  return work;
}

// Average over the orbit of coordinate permutations and sign flips; the
// exact table has this symmetry, so averaging removes roundoff asymmetry.
void symmetrize(int d, int L, std::vector<double>& v) {
  const BoxIndexer idx(d, L);
  std::vector<double> acc(v.size(), 0.0);
  std::vector<std::uint32_t> cnt(v.size(), 0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    Point p = idx.unflatten(i);
    Point c = Point::zero(d);
    for (int a = 0; a < d; ++a) c[a] = std::abs(p[a]);
    std::vector<Coord> s(static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a) s[static_cast<std::size_t>(a)] = c[a];
    std::sort(s.begin(), s.end(), std::greater<Coord>());
    for (int a = 0; a < d; ++a) c[a] = s[static_cast<std::size_t>(a)];
    const std::size_t rep = idx.flatten(c);
    acc[rep] += v[i];
    cnt[rep] += 1;
  }
  for (std::size_t i = 0; i < v.size(); ++i) {
    Point p = idx.unflatten(i);
    Point c = Point::zero(d);
    std::vector<Coord> s(static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a) s[static_cast<std::size_t>(a)] = std::abs(p[a]);
    std::sort(s.begin(), s.end(), std::greater<Coord>());
    for (int a = 0; a < d; ++a) c[a] = s[static_cast<std::size_t>(a)];
    const std::size_t rep = idx.flatten(c);
    v[i] = acc[rep] / cnt[rep];
  }
}

}  // namespace

std::string table_kind_name(TableKind k) {
  return k == TableKind::PotentialKernel ? "potential-kernel" : "green";
}

double PotentialTable::at(const Point& x) const {
  const BoxIndexer idx = indexer();
  if (!idx.contains(x)) {
    throw std::out_of_range("point " + x.str() + " outside table of radius " +
                            std::to_string(L));
  }
  return values[idx.flatten(x)];
}

double PotentialTable::mean_value_residual() const {
  const BoxIndexer idx = indexer();
  double worst = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const Point p = idx.unflatten(i);
    bool interior = true;
    double avg = 0.0;
    for (const Point& q : neighbors(p)) {
      if (!idx.contains(q)) {
        interior = false;
        break;
      }
      avg += values[idx.flatten(q)];
    }
    if (!interior) continue;
    avg /= static_cast<double>(2 * d);
    double defect;
    if (p.is_origin()) {
      // a: average of neighbours equals 1; G: value = 1 + average.
      defect = kind == TableKind::PotentialKernel ? std::abs(avg - 1.0)
                                                  : std::abs(values[i] - 1.0 - avg);
    } else {
      defect = std::abs(avg - values[i]);
    }
    worst = std::max(worst, defect);
  }
  return worst;
}

PotentialTable potential_kernel(int L) {
  if (L < 2) throw std::invalid_argument("potential_kernel requires L >= 2");
  const std::vector<double> oct = mccrea_whipple_octant(L);
  const auto tri = [](int m, int n) {
    return static_cast<std::size_t>(m) * (static_cast<std::size_t>(m) + 1) / 2 +
           static_cast<std::size_t>(n);
  };

  PotentialTable t;
  t.d = 2;
  t.kind = TableKind::PotentialKernel;
  t.L = L;
  t.method = "mccrea-whipple";
  const BoxIndexer idx = t.indexer();
  t.values.resize(idx.size());
  for (std::size_t i = 0; i < t.values.size(); ++i) {
    const Point p = idx.unflatten(i);
    const Coord a0 = std::abs(p[0]);
    const Coord a1 = std::abs(p[1]);
    const int m = static_cast<int>(std::max(a0, a1));
    const int n = static_cast<int>(std::min(a0, a1));
    t.values[i] = oct[tri(m, n)];
  }

  const double res = t.mean_value_residual();
  const double diag_err = std::abs(t.at(Point{1, 1}) - 4.0 / M_PI);
  t.accuracy = std::max({res, diag_err, 1e-15});
  if (t.accuracy > 1e-8) {
    throw NumericError("potential kernel construction exceeded tolerance", t.accuracy);
  }
  return t;
}

PotentialTable line_kernel(int L) {
  if (L < 2) throw std::invalid_argument("line_kernel requires L >= 2");
  PotentialTable t;
  t.d = 1;
  t.kind = TableKind::PotentialKernel;
  t.L = L;
  t.method = "exact-line";
  t.accuracy = 0.0;
  const BoxIndexer idx = t.indexer();
  t.values.resize(idx.size());
  for (std::size_t i = 0; i < t.values.size(); ++i) {
    t.values[i] = std::abs(static_cast<double>(idx.unflatten(i)[0]));
  }
  return t;
}

double unit_ball_volume(int d) {
  return std::pow(M_PI, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
}

PotentialTable green_table(int L, int d) {
  if (d < 3 || d > 5) throw std::invalid_argument("green_table requires 3 <= d <= 5");
  if (L < 4) throw std::invalid_argument("green_table requires L >= 4");

  const double a_d = 2.0 / ((d - 2) * unit_ball_volume(d));

  const int r_big = 3 * L;
  const int r_small = (3 * L) / 2;
  const std::vector<double> big = green_box_solve(d, r_big, a_d);
  const std::vector<double> small = green_box_solve(d, r_small, a_d);
  const BoxIndexer big_idx(d, r_big - 1);
  const BoxIndexer small_idx(d, r_small - 1);

  PotentialTable t;
  t.d = d;
  t.kind = TableKind::Green;
  t.L = L;
  t.method = "poisson-dirichlet-3L";
  const BoxIndexer idx = t.indexer();
  t.values.resize(idx.size());
  double boundary_err = 0.0;
  for (std::size_t i = 0; i < t.values.size(); ++i) {
    const Point p = idx.unflatten(i);
    t.values[i] = big[big_idx.flatten(p)];
    boundary_err = std::max(
        boundary_err, std::abs(t.values[i] - small[small_idx.flatten(p)]));
  }
  symmetrize(d, L, t.values);

  const double res = t.mean_value_residual();
  t.accuracy = std::max({boundary_err, res, 1e-15});
  if (res > 1e-6) {
    throw NumericError("green_table solve left a large mean-value residual", res);
  }
  return t;
}

double HarmonicProfile::h_at(const Point& x) const {
  const BoxIndexer idx = table.indexer();
  if (!idx.contains(x)) {
    throw std::out_of_range("point " + x.str() + " outside profile of radius " +
                            std::to_string(L));
  }
  return h[idx.flatten(x)];
}

HarmonicProfile build_profile(const PotentialTable& table, const Point& z) {
  if (!z.is_origin() || z.dim() != table.d) {
    throw std::invalid_argument("build_profile expects the target at the origin");
  }
  const bool kernel = table.kind == TableKind::PotentialKernel;
  if (kernel && table.d > 2) {
    throw std::invalid_argument("potential-kernel tables exist only for d <= 2");
  }
  if (!kernel && table.d < 3) {
    throw std::invalid_argument("green tables exist only for d >= 3");
  }

  HarmonicProfile prof;
  prof.table = table;
  prof.d = table.d;
  prof.L = table.L;
  prof.b = kEulerGamma + 1.5 * std::log(2.0);
  prof.omega_d = unit_ball_volume(table.d);
  prof.h.resize(table.values.size());

  if (table.d == 1) {
    prof.h = table.values;
    prof.h_inf = std::numeric_limits<double>::infinity();
    prof.a_d = 0.0;
    prof.p_d = 0.0;
  } else if (table.d == 2) {
    for (std::size_t i = 0; i < prof.h.size(); ++i) {
      prof.h[i] = 0.5 * M_PI * table.values[i];
    }
    prof.h_inf = std::numeric_limits<double>::infinity();
    prof.a_d = 0.0;
    prof.p_d = 0.0;
  } else {
    prof.a_d = 2.0 / ((table.d - 2) * prof.omega_d);
    const double g0 = table.at(Point::zero(table.d));
    prof.p_d = 1.0 / g0;
    prof.h_inf = g0 / prof.a_d;
    for (std::size_t i = 0; i < prof.h.size(); ++i) {
      prof.h[i] = (g0 - table.values[i]) / prof.a_d;
    }
  }
  return prof;
}

double local_variance(const HarmonicProfile& profile, const Point& x) {
  const double hx = profile.h_at(x);
  double acc = 0.0;
  for (const Point& y : neighbors(x)) {
    const double dy = profile.h_at(y) - hx;  // throws if out of table
    acc += dy * dy;
  }
  return acc / static_cast<double>(2 * profile.d);
}

}  // namespace rgrade
