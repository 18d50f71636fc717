#pragma once

#include <stdexcept>
#include <string>

namespace rgrade {

// Numeric failure: non-convergence of an iterative scheme, quadrature
// breakdown, or an envelope fit that found no admissible constant.
// Carries the offending residual (or gap) for diagnostics.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg, double residual = 0.0)
      : std::runtime_error(msg), residual_(residual) {}

  double residual() const { return residual_; }

 private:
  double residual_;
};

}  // namespace rgrade
