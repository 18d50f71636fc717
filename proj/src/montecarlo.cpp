#include "rgrade/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "rgrade/errors.hpp"
#include "rgrade/rng.hpp"

namespace rgrade {

StrategySpec StrategySpec::never() { return StrategySpec{}; }

StrategySpec StrategySpec::euclidean_threshold(double rho) {
  StrategySpec s;
  s.kind = Kind::EuclideanThreshold;
  s.rho = rho;
  return s;
}

StrategySpec StrategySpec::h_threshold(double tau, const HarmonicProfile& profile) {
  StrategySpec s;
  s.kind = Kind::HThreshold;
  s.tau = tau;
  s.profile = &profile;
  return s;
}

StrategySpec StrategySpec::custom(std::function<bool(const Point&)> predicate) {
  StrategySpec s;
  s.kind = Kind::Custom;
  s.predicate = std::move(predicate);
  return s;
}

bool StrategySpec::restarts(const Point& y) const {
  switch (kind) {
    case Kind::Never:
      return false;
    case Kind::EuclideanThreshold:
      return y.norm() > rho;
    case Kind::HThreshold:
      return profile->covers(y) ? profile->h_at(y) > tau : true;
    case Kind::Custom:
      return predicate(y);
  }
  return false;
}

std::uint64_t WalkParams::resolved_cap() const {
  return step_cap != 0 ? step_cap
                       : 100'000'000ULL * static_cast<std::uint64_t>(d);
}

namespace {

// One replicate: returns moves taken, or the cap if censored.
std::uint64_t run_walk(const WalkParams& p, const StrategySpec& strat,
                       std::uint64_t cap, std::uint64_t replicate,
                       bool& censored) {
  SplitMix64 rng = SplitMix64::substream(p.seed, replicate);
  const std::uint32_t n_dirs = static_cast<std::uint32_t>(2 * p.d);
  Point x = p.x0;
  std::uint64_t steps = 0;
  while (true) {
    const std::uint32_t dir = rng.next_below(n_dirs);
    const int axis = static_cast<int>(dir >> 1);
    x[axis] += (dir & 1) ? -1 : 1;
    ++steps;
    if (x == p.z) {
      censored = false;
      return steps;
    }
    if (steps >= cap) {
      censored = true;
      return steps;
    }
    if (strat.restarts(x)) x = p.x0;
  }
}

void validate(const WalkParams& p) {
  if (p.replicates < 1) throw std::invalid_argument("replicates must be >= 1");
  if (p.resolved_cap() < 1) throw std::invalid_argument("step cap must be >= 1");
  if (p.x0.dim() != p.d) throw std::invalid_argument("x0 dimension mismatch");
}

}  // namespace

McEstimate simulate_strategy(const WalkParams& params, const StrategySpec& strategy) {
  validate(params);
  WalkParams p = params;
  if (p.z.dim() != p.d) p.z = Point::zero(p.d);
  if (p.x0 == p.z) throw std::invalid_argument("x0 must differ from the target");
  const std::uint64_t cap = p.resolved_cap();
  const std::uint64_t n = p.replicates;

  std::vector<std::uint64_t> steps(n);
  std::vector<std::uint8_t> cens(n);

  const auto run_block = [&](std::uint64_t i0, std::uint64_t i1) {
    for (std::uint64_t i = i0; i < i1; ++i) {
      bool c = false;
      steps[i] = run_walk(p, strategy, cap, i, c);
      cens[i] = c ? 1 : 0;
    }
  };

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::uint64_t n_threads =
      std::max<std::uint64_t>(1, std::min<std::uint64_t>({static_cast<std::uint64_t>(p.threads),
                                                          hw, n}));
  if (n_threads <= 1) {
    run_block(0, n);
  } else {
    std::vector<std::thread> pool;
    const std::uint64_t per = n / n_threads;
    for (std::uint64_t t = 0; t < n_threads; ++t) {
      const std::uint64_t i0 = t * per;
      const std::uint64_t i1 = (t + 1 == n_threads) ? n : i0 + per;
      pool.emplace_back(run_block, i0, i1);
    }
    for (auto& th : pool) th.join();
  }

  // Reduce in replicate order with integer accumulators, so the estimate is
  // exactly the same regardless of the thread count.
  std::uint64_t n_ok = 0;
  unsigned __int128 sum = 0;
  unsigned __int128 sum_sq = 0;
  std::uint64_t n_censored = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    if (cens[i]) {
      ++n_censored;
      continue;
    }
    ++n_ok;
    sum += steps[i];
    sum_sq += static_cast<unsigned __int128>(steps[i]) * steps[i];
  }
  if (n_ok == 0) {
    throw NumericError("all replicates censored at the step cap; estimate unusable",
                       static_cast<double>(cap));
  }

  McEstimate est;
  est.replicates = n_ok;
  est.censored = n_censored;
  est.seed = p.seed;
  const double s1 = static_cast<double>(sum);
  const double s2 = static_cast<double>(sum_sq);
  const double nn = static_cast<double>(n_ok);
  est.mean = s1 / nn;
  if (n_ok > 1) {
    const double var = std::max(0.0, (s2 - s1 * s1 / nn) / (nn - 1.0));
    est.std_error = std::sqrt(var / nn);
  }
  return est;
}

std::vector<std::pair<std::string, McEstimate>> compare_strategies(
    const WalkParams& params,
    const std::vector<std::pair<std::string, StrategySpec>>& strategies) {
  if (strategies.size() < 2) {
    throw std::invalid_argument("compare_strategies needs at least two strategies");
  }
  std::vector<std::pair<std::string, McEstimate>> out;
  out.reserve(strategies.size());
  for (const auto& [name, strat] : strategies) {
    out.emplace_back(name, simulate_strategy(params, strat));
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.second.mean < b.second.mean;
  });
  return out;
}

}  // namespace rgrade
