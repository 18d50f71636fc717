#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "rgrade/errors.hpp"

namespace rgrade::detail {

// Jacobi-preconditioned conjugate gradients for an SPD operator given as a
// matrix-free apply. Convergence is declared on the normalized sup norm
// sup_i |r_i / diag_i| <= tol, matching the mean-value residual the callers
// assert. All loops are serial, so results are bitwise deterministic.
//
// `apply(x, y)` must write y = A x.
template <class Apply>
std::vector<double> cg_solve(std::size_t n, Apply&& apply,
                             const std::vector<double>& b,
                             const std::vector<double>& diag, double tol,
                             std::size_t max_iters,
                             const std::vector<double>* x0 = nullptr) {
  std::vector<double> x = x0 ? *x0 : std::vector<double>(n, 0.0);
  std::vector<double> r(n), z(n), p(n), ap(n);

  apply(x, ap);
  double sup = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    r[i] = b[i] - ap[i];
    sup = std::max(sup, std::abs(r[i]) / diag[i]);
  }
  if (sup <= tol) return x;

  for (std::size_t i = 0; i < n; ++i) {
    z[i] = r[i] / diag[i];
    p[i] = z[i];
  }
  double rz = 0.0;
  for (std::size_t i = 0; i < n; ++i) rz += r[i] * z[i];

  for (std::size_t it = 0; it < max_iters; ++it) {
    apply(p, ap);
    double pap = 0.0;
    for (std::size_t i = 0; i < n; ++i) pap += p[i] * ap[i];
    if (!(pap > 0.0)) {
      throw NumericError("conjugate gradient breakdown (operator not SPD?)", pap);
    }
    const double alpha = rz / pap;
    sup = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
      sup = std::max(sup, std::abs(r[i]) / diag[i]);
    }
    if (sup <= tol) return x;
    double rz_next = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      z[i] = r[i] / diag[i];
      rz_next += r[i] * z[i];
    }
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  throw NumericError("conjugate gradient failed to reach tolerance", sup);
}

}  // namespace rgrade::detail
