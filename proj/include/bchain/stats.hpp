#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "bchain/core.hpp"
#include "bchain/microsim.hpp"

namespace bchain::stats {

/// 1.96: two-sided 95% normal quantile used for every interval here.
inline constexpr double kZ95 = 1.96;

/// Counts of the energy vector per state. `states` is sorted
/// lexicographically, the same indexing as limit::LimitChain.
struct EmpiricalDistribution {
  std::vector<EnergyVector> states;
  std::vector<std::size_t> counts;
  std::size_t total = 0;

  std::vector<double> probabilities() const;
};

/// Value of every path at macro time t, counted over `states`. Throws when a
/// path does not cover t or hits a state outside `states`.
EmpiricalDistribution empirical_distribution(std::span<const EnergyPath> paths, double t,
                                             const std::vector<EnergyVector>& states);
/// Same, indexing by the sorted set of observed states.
EmpiricalDistribution empirical_distribution(std::span<const EnergyPath> paths, double t);

/// Half the L1 distance. Throws std::invalid_argument on size mismatch.
double tv_distance(std::span<const double> p, std::span<const double> q);
/// Empirical law against a distribution on `states` (must be the same list).
double tv_distance(const EmpiricalDistribution& p, const std::vector<EnergyVector>& states,
                   std::span<const double> q);
/// Two empirical laws, aligned on the union of their states.
double tv_distance(const EmpiricalDistribution& p, const EmpiricalDistribution& q);

/// 95% half-width for a TV estimate from an empirical law:
/// 1.96 * (1/2) * sum_i sqrt(p_i (1 - p_i) / n).
double tv_ci_half_width(const EmpiricalDistribution& p);

struct RateEstimate {
  double rate = 0.0;  // 1/macro time
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::size_t events = 0;
  double exposure = 0.0;  // macro time at risk

  double half_width() const { return 0.5 * (ci_hi - ci_lo); }
};

inline constexpr std::size_t kMinRateSamples = 100;

/// Exponential fit to first-collision macro times (micro time * epsilon).
/// Logs without a collision are right-censored at their horizon. The
/// estimate is events / exposure with a normal interval rate * (1 +- 1.96 /
/// sqrt(events)). Throws NumericalError below kMinRateSamples events.
RateEstimate swap_rate_estimate(std::span<const CollisionLog> logs);

struct WaitingTime {
  double time = 0.0;
  bool censored = false;
};

/// Same estimator on explicit (possibly censored) waiting times.
RateEstimate exponential_rate_fit(std::span<const WaitingTime> samples);

inline constexpr std::size_t kMinTailReplicas = 1000;

/// Empirical P(count of collisions of `pair` >= n) for each n in thresholds.
std::vector<double> jump_count_tail(std::span<const CollisionLog> logs, std::size_t pair,
                                    std::span<const std::size_t> thresholds);

struct RecollisionReport {
  std::size_t collisions = 0;
  std::size_t recollisions = 0;
  double window_micro = 0.0;
  std::string ratio_label;
  double fraction = 0.0;
  double ci_half = 0.0;
};

/// Fraction of collisions of `pair` followed by another collision of the same
/// pair within window_micro. Collisions whose window runs past the end of the
/// log are not counted.
RecollisionReport recollision_stats(std::span<const CollisionLog> logs, double window_micro,
                                    std::size_t pair = 0, std::string ratio_label = {});

}  // namespace bchain::stats
