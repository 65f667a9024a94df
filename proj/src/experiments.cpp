#include "bchain/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "bchain/parallel.hpp"

namespace bchain::experiments {

std::vector<ReplicaOutput> simulate_replicas(const SystemConfig& config, double horizon_macro,
                                             std::size_t threads) {
  config.validate();
  return map_replicas(config.replicas, threads, [&](std::size_t r) {
    RngStream rng(config.seed, r);
    RunResult result = run(config, horizon_macro, rng);
    return ReplicaOutput{std::move(result.path), std::move(result.log)};
  });
}

namespace {

std::vector<EnergyPath> paths_of(std::vector<ReplicaOutput>&& outputs) {
  std::vector<EnergyPath> paths;
  paths.reserve(outputs.size());
  for (auto& o : outputs) {
    paths.push_back(std::move(o.path));
  }
  return paths;
}

std::vector<CollisionLog> logs_of(std::vector<ReplicaOutput>&& outputs) {
  std::vector<CollisionLog> logs;
  logs.reserve(outputs.size());
  for (auto& o : outputs) {
    logs.push_back(std::move(o.log));
  }
  return logs;
}

void require_nonempty(const std::vector<double>& values, const char* key) {
  if (values.empty()) {
    throw ConfigError(key, "must list at least one value");
  }
}

}  // namespace

std::vector<CompareRow> compare_ladder(const SystemConfig& config, const std::vector<double>& epsilon_ladder,
                                       const std::vector<double>& t_list, std::size_t threads,
                                       Reference reference, std::size_t state_cap) {
  require_nonempty(epsilon_ladder, "epsilon_ladder");
  require_nonempty(t_list, "t_list");
  for (double t : t_list) {
    if (!(t >= 0.0 && t <= 1.0)) {
      throw ConfigError("t_list", "times must lie in [0, 1]");
    }
  }
  const double horizon = std::max(*std::max_element(t_list.begin(), t_list.end()), 1e-12);

  // Reference laws do not depend on epsilon.
  std::vector<std::vector<double>> exact;
  std::vector<EnergyVector> states;
  std::vector<stats::EmpiricalDistribution> sampled;
  if (reference == Reference::Uniformization) {
    const limit::LimitChain chain = limit::build_chain(config.energies, state_cap);
    states = chain.states;
    for (double t : t_list) {
      exact.push_back(limit::solve_distribution(chain, t));
    }
  } else {
    const std::uint64_t ref_seed = mix_seed(config.seed, 0x6a11e5);
    auto paths = map_replicas(config.replicas, threads, [&](std::size_t r) {
      RngStream rng(ref_seed, r);
      return limit::gillespie_run(config.energies, horizon, rng);
    });
    for (double t : t_list) {
      sampled.push_back(stats::empirical_distribution(paths, t));
    }
  }

  std::vector<CompareRow> rows;
  for (double eps : epsilon_ladder) {
    SystemConfig c = config;
    c.epsilon = eps;
    const auto paths = paths_of(simulate_replicas(c, horizon, threads));
    for (std::size_t i = 0; i < t_list.size(); ++i) {
      CompareRow row{eps, t_list[i], 0.0, 0.0};
      if (reference == Reference::Uniformization) {
        const auto emp = stats::empirical_distribution(paths, t_list[i], states);
        row.tv = stats::tv_distance(emp, states, exact[i]);
        row.ci = stats::tv_ci_half_width(emp);
      } else {
        const auto emp = stats::empirical_distribution(paths, t_list[i]);
        row.tv = stats::tv_distance(emp, sampled[i]);
        row.ci = stats::tv_ci_half_width(emp) + stats::tv_ci_half_width(sampled[i]);
      }
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<RateRow> rate_sweep(const SystemConfig& config, const std::vector<double>& epsilon_ladder,
                                const std::vector<double>& lambda_list, double horizon_macro,
                                std::size_t threads) {
  require_nonempty(epsilon_ladder, "epsilon_ladder");
  require_nonempty(lambda_list, "lambda_list");
  if (config.n_particles != 2) {
    throw ConfigError("n_particles", "rate fits need exactly 2 particles");
  }
  std::vector<std::size_t> thresholds(11);
  for (std::size_t n = 0; n < thresholds.size(); ++n) {
    thresholds[n] = n;
  }
  std::vector<RateRow> rows;
  for (std::size_t li = 0; li < lambda_list.size(); ++li) {
    for (double eps : epsilon_ladder) {
      SystemConfig c = config;
      c.epsilon = eps;
      c.lambda = lambda_list[li];
      if (lambda_list.size() > 1) {
        c.seed = mix_seed(config.seed, li + 1);
      }
      const auto logs = logs_of(simulate_replicas(c, horizon_macro, threads));
      RateRow row{eps, c.lambda, stats::swap_rate_estimate(logs), {}};
      if (logs.size() >= stats::kMinTailReplicas) {
        row.count_tail = stats::jump_count_tail(logs, 0, thresholds);
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::vector<RecollisionRow> recollision_sweep(const SystemConfig& config,
                                              const std::vector<double>& epsilon_ladder, double window_micro,
                                              double horizon_macro, std::size_t threads) {
  require_nonempty(epsilon_ladder, "epsilon_ladder");
  if (config.n_particles != 2) {
    throw ConfigError("n_particles", "recollision statistics need exactly 2 particles");
  }
  const std::string label = ratio_label(config);
  std::vector<RecollisionRow> rows;
  for (double eps : epsilon_ladder) {
    SystemConfig c = config;
    c.epsilon = eps;
    const auto logs = logs_of(simulate_replicas(c, horizon_macro, threads));
    rows.push_back({eps, stats::recollision_stats(logs, window_micro, 0, label)});
  }
  return rows;
}

std::string ratio_label(const SystemConfig& config) {
  const EnergyLevels levels = resolve_levels(config);
  const auto [lo, hi] = std::minmax_element(levels.speeds.begin(), levels.speeds.end());
  std::ostringstream out;
  out.precision(6);
  out << (*hi / *lo);
  return out.str();
}

}  // namespace bchain::experiments
