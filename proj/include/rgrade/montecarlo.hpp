#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rgrade/harmonic.hpp"
#include "rgrade/lattice.hpp"

namespace rgrade {

// A restart rule: a pure predicate of the current point. Restarting jumps
// back to x0 at zero cost.
struct StrategySpec {
  enum class Kind { Never, EuclideanThreshold, HThreshold, Custom };

  Kind kind = Kind::Never;
  double rho = 0.0;                        // Euclidean threshold
  double tau = 0.0;                        // h threshold
  const HarmonicProfile* profile = nullptr;
  std::function<bool(const Point&)> predicate;

  static StrategySpec never();
  static StrategySpec euclidean_threshold(double rho);
  static StrategySpec h_threshold(double tau, const HarmonicProfile& profile);
  static StrategySpec custom(std::function<bool(const Point&)> predicate);

  // Points not covered by the profile are treated as restart-worthy for the
  // h rule (h only grows out there).
  bool restarts(const Point& y) const;
};

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t replicates = 0;  // uncensored count used for the mean
  std::uint64_t censored = 0;
  std::uint64_t seed = 0;
};

struct WalkParams {
  int d = 2;
  Point x0;
  Point z;  // default origin
  std::uint64_t replicates = 10000;
  std::uint64_t step_cap = 0;  // 0 selects the default 1e8 * d
  std::uint64_t seed = 0;
  int threads = 1;

  std::uint64_t resolved_cap() const;
};

// Mean number of moves to reach z from x0 under the strategy. Each lattice
// move costs 1; a restart after a move is free. Replicate i draws from the
// substream (seed, i), so results are independent of the thread count.
McEstimate simulate_strategy(const WalkParams& params, const StrategySpec& strategy);

// Common-random-numbers comparison: the same substreams drive every
// strategy. Returned sorted by mean, ascending (stable on ties).
std::vector<std::pair<std::string, McEstimate>> compare_strategies(
    const WalkParams& params,
    const std::vector<std::pair<std::string, StrategySpec>>& strategies);

}  // namespace rgrade
