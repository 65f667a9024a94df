#include "bchain/stats.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace bchain::stats {

std::vector<double> EmpiricalDistribution::probabilities() const {
  std::vector<double> p(counts.size(), 0.0);
  if (total == 0) {
    return p;
  }
  for (std::size_t i = 0; i < counts.size(); ++i) {
    p[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
  }
  return p;
}

EmpiricalDistribution empirical_distribution(std::span<const EnergyPath> paths, double t,
                                             const std::vector<EnergyVector>& states) {
  EmpiricalDistribution out;
  out.states = states;
  out.counts.assign(states.size(), 0);
  for (const auto& path : paths) {
    if (path.values.empty() || t > path.horizon || t < 0.0) {
      std::ostringstream msg;
      msg << "empirical_distribution: path covers [0, " << path.horizon << "], asked for t=" << t;
      throw std::invalid_argument(msg.str());
    }
    const EnergyVector& value = path.value_at(t);
    auto it = std::lower_bound(states.begin(), states.end(), value);
    if (it == states.end() || *it != value) {
      throw std::invalid_argument("empirical_distribution: observed state outside the state list");
    }
    ++out.counts[static_cast<std::size_t>(it - states.begin())];
    ++out.total;
  }
  return out;
}

EmpiricalDistribution empirical_distribution(std::span<const EnergyPath> paths, double t) {
  std::set<EnergyVector> seen;
  for (const auto& path : paths) {
    if (path.values.empty() || t > path.horizon || t < 0.0) {
      throw std::invalid_argument("empirical_distribution: path does not cover t");
    }
    seen.insert(path.value_at(t));
  }
  return empirical_distribution(paths, t, std::vector<EnergyVector>(seen.begin(), seen.end()));
}

double tv_distance(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) {
    throw std::invalid_argument("tv_distance: state spaces differ in size");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    sum += std::abs(p[i] - q[i]);
  }
  return 0.5 * sum;
}

double tv_distance(const EmpiricalDistribution& p, const std::vector<EnergyVector>& states,
                   std::span<const double> q) {
  if (p.states != states) {
    throw std::invalid_argument("tv_distance: state indexing differs");
  }
  const auto probs = p.probabilities();
  return tv_distance(probs, q);
}

double tv_distance(const EmpiricalDistribution& p, const EmpiricalDistribution& q) {
  std::set<EnergyVector> all(p.states.begin(), p.states.end());
  all.insert(q.states.begin(), q.states.end());
  const std::vector<EnergyVector> states(all.begin(), all.end());
  auto aligned = [&](const EmpiricalDistribution& d) {
    std::vector<double> out(states.size(), 0.0);
    const auto probs = d.probabilities();
    for (std::size_t i = 0; i < d.states.size(); ++i) {
      auto it = std::lower_bound(states.begin(), states.end(), d.states[i]);
      out[static_cast<std::size_t>(it - states.begin())] = probs[i];
    }
    return out;
  };
  const auto a = aligned(p);
  const auto b = aligned(q);
  return tv_distance(a, b);
}

double tv_ci_half_width(const EmpiricalDistribution& p) {
  if (p.total == 0) {
    return 0.0;
  }
  const double n = static_cast<double>(p.total);
  double sum = 0.0;
  for (double pi : p.probabilities()) {
    sum += std::sqrt(pi * (1.0 - pi) / n);
  }
  return kZ95 * 0.5 * sum;
}

RateEstimate exponential_rate_fit(std::span<const WaitingTime> samples) {
  RateEstimate est;
  for (const auto& w : samples) {
    if (!(w.time >= 0.0)) {
      throw std::invalid_argument("exponential_rate_fit: negative waiting time");
    }
    est.exposure += w.time;
    if (!w.censored) {
      ++est.events;
    }
  }
  if (est.events < kMinRateSamples) {
    std::ostringstream msg;
    msg << "rate fit needs at least " << kMinRateSamples << " observed first collisions, got " << est.events;
    throw NumericalError(msg.str());
  }
  est.rate = static_cast<double>(est.events) / est.exposure;
  const double half = kZ95 * est.rate / std::sqrt(static_cast<double>(est.events));
  est.ci_lo = est.rate - half;
  est.ci_hi = est.rate + half;
  return est;
}

RateEstimate swap_rate_estimate(std::span<const CollisionLog> logs) {
  std::vector<WaitingTime> samples;
  samples.reserve(logs.size());
  for (const auto& log : logs) {
    if (log.records.empty()) {
      samples.push_back({log.horizon_micro * log.epsilon, true});
    } else {
      samples.push_back({log.records.front().time * log.epsilon, false});
    }
  }
  return exponential_rate_fit(samples);
}

std::vector<double> jump_count_tail(std::span<const CollisionLog> logs, std::size_t pair,
                                    std::span<const std::size_t> thresholds) {
  if (logs.size() < kMinTailReplicas) {
    std::ostringstream msg;
    msg << "jump_count_tail: needs at least " << kMinTailReplicas << " replicas, got " << logs.size();
    throw std::invalid_argument(msg.str());
  }
  std::vector<std::size_t> counts;
  counts.reserve(logs.size());
  for (const auto& log : logs) {
    counts.push_back(count_collisions(log, pair));
  }
  std::vector<double> tail;
  tail.reserve(thresholds.size());
  for (std::size_t n : thresholds) {
    const auto hits = std::count_if(counts.begin(), counts.end(), [n](std::size_t c) { return c >= n; });
    tail.push_back(static_cast<double>(hits) / static_cast<double>(logs.size()));
  }
  return tail;
}

RecollisionReport recollision_stats(std::span<const CollisionLog> logs, double window_micro, std::size_t pair,
                                    std::string ratio_label) {
  if (!(window_micro >= 0.0)) {
    throw std::invalid_argument("recollision_stats: window must be nonnegative");
  }
  RecollisionReport report;
  report.window_micro = window_micro;
  report.ratio_label = std::move(ratio_label);
  for (const auto& log : logs) {
    std::vector<double> times;
    for (const auto& r : log.records) {
      if (r.pair == pair) {
        times.push_back(r.time);
      }
    }
    for (std::size_t i = 0; i < times.size(); ++i) {
      if (times[i] + window_micro > log.horizon_micro) {
        continue;
      }
      ++report.collisions;
      if (window_micro > 0.0 && i + 1 < times.size() && times[i + 1] - times[i] <= window_micro) {
        ++report.recollisions;
      }
    }
  }
  if (report.collisions > 0) {
    const double n = static_cast<double>(report.collisions);
    report.fraction = static_cast<double>(report.recollisions) / n;
    report.ci_half = kZ95 * std::sqrt(report.fraction * (1.0 - report.fraction) / n);
  }
  return report;
}

}  // namespace bchain::stats
