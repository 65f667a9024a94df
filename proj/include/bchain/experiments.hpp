#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "bchain/core.hpp"
#include "bchain/limit_process.hpp"
#include "bchain/microsim.hpp"
#include "bchain/stats.hpp"

namespace bchain::experiments {

struct ReplicaOutput {
  EnergyPath path;
  CollisionLog log;
};

/// config.replicas independent runs; replica r uses RngStream(config.seed, r).
std::vector<ReplicaOutput> simulate_replicas(const SystemConfig& config, double horizon_macro,
                                             std::size_t threads);

enum class Reference { Uniformization, Gillespie };

struct CompareRow {
  double epsilon = 0.0;
  double t = 0.0;
  double tv = 0.0;
  double ci = 0.0;
};

/// Microsim empirical law of the energy vector at each t against the limit
/// chain: the exact uniformization solution, or (for orbits above the state
/// cap) an independent Gillespie ensemble of the same size.
std::vector<CompareRow> compare_ladder(const SystemConfig& config, const std::vector<double>& epsilon_ladder,
                                       const std::vector<double>& t_list, std::size_t threads,
                                       Reference reference = Reference::Uniformization,
                                       std::size_t state_cap = limit::kDefaultStateCap);

struct RateRow {
  double epsilon = 0.0;
  double lambda = 0.0;
  stats::RateEstimate estimate;
  /// P(count >= n) for n = 0..10, pair 0, from the same runs.
  std::vector<double> count_tail;
};

/// First-collision rate fits over an epsilon ladder and a list of flip rates,
/// from full runs of horizon_macro (censored when no collision occurs). The
/// same seed is used along the epsilon ladder; each lambda gets its own
/// derived seed.
std::vector<RateRow> rate_sweep(const SystemConfig& config, const std::vector<double>& epsilon_ladder,
                                const std::vector<double>& lambda_list, double horizon_macro,
                                std::size_t threads);

struct RecollisionRow {
  double epsilon = 0.0;
  stats::RecollisionReport report;
};

std::vector<RecollisionRow> recollision_sweep(const SystemConfig& config,
                                              const std::vector<double>& epsilon_ladder, double window_micro,
                                              double horizon_macro, std::size_t threads);

/// Label for the speed ratio of a two-level system, e.g. "2" or "1.41421".
std::string ratio_label(const SystemConfig& config);

}  // namespace bchain::experiments
