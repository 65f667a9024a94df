#include "bchain/limit_process.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace bchain::limit {

double rate_gamma(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw std::invalid_argument("rate_gamma: energies must be positive");
  }
  return 0.5 * std::max(std::sqrt(2.0 * a), std::sqrt(2.0 * b));
}

std::size_t LimitChain::index_of(const EnergyVector& e) const {
  auto it = std::lower_bound(states.begin(), states.end(), e);
  if (it == states.end() || *it != e) {
    return states.size();
  }
  return static_cast<std::size_t>(it - states.begin());
}

double LimitChain::generator(std::size_t i, std::size_t j) const {
  if (i == j) {
    return -exit_rate.at(i);
  }
  double q = 0.0;
  for (const auto& tr : transitions.at(i)) {
    if (tr.to == j) {
      q += tr.rate;
    }
  }
  return q;
}

namespace {

// N! / prod(multiplicity!) in floating point; only compared against a cap.
double orbit_size(EnergyVector sorted) {
  double log_count = std::lgamma(static_cast<double>(sorted.size()) + 1.0);
  std::size_t run = 1;
  for (std::size_t i = 1; i <= sorted.size(); ++i) {
    if (i < sorted.size() && sorted[i] == sorted[i - 1]) {
      ++run;
    } else {
      log_count -= std::lgamma(static_cast<double>(run) + 1.0);
      run = 1;
    }
  }
  return std::round(std::exp(log_count));
}

}  // namespace

LimitChain build_chain(const EnergyVector& initial, std::size_t state_cap) {
  if (initial.empty()) {
    throw std::invalid_argument("build_chain: empty energy vector");
  }
  for (double e : initial) {
    if (!(e > 0.0) || !std::isfinite(e)) {
      throw std::invalid_argument("build_chain: energies must be positive and finite");
    }
  }
  EnergyVector sorted = initial;
  std::sort(sorted.begin(), sorted.end());
  const double count = orbit_size(sorted);
  if (count > static_cast<double>(state_cap)) {
    std::ostringstream msg;
    msg << "limit chain has " << count << " states, above the cap of " << state_cap
        << "; sample trajectories with gillespie_run instead";
    throw NumericalError(msg.str());
  }

  LimitChain chain;
  // Adjacent transpositions generate every permutation, so the orbit is the
  // full set of distinct permutations; next_permutation yields it sorted.
  do {
    chain.states.push_back(sorted);
  } while (std::next_permutation(sorted.begin(), sorted.end()));

  const std::size_t n = initial.size();
  chain.transitions.resize(chain.states.size());
  chain.exit_rate.assign(chain.states.size(), 0.0);
  for (std::size_t i = 0; i < chain.states.size(); ++i) {
    const EnergyVector& s = chain.states[i];
    for (std::size_t k = 0; k + 1 < n; ++k) {
      if (s[k] == s[k + 1]) {
        continue;
      }
      EnergyVector next = s;
      std::swap(next[k], next[k + 1]);
      const double rate = rate_gamma(s[k], s[k + 1]);
      chain.transitions[i].push_back({chain.index_of(next), rate, k});
      chain.exit_rate[i] += rate;
    }
  }
  chain.initial = chain.index_of(initial);
  return chain;
}

std::vector<double> solve_distribution(const LimitChain& chain, double t, double tolerance) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw std::invalid_argument("solve_distribution: t must be finite and nonnegative");
  }
  const std::size_t n = chain.size();
  std::vector<double> v(n, 0.0);
  v.at(chain.initial) = 1.0;
  const double max_exit = *std::max_element(chain.exit_rate.begin(), chain.exit_rate.end());
  if (t == 0.0 || max_exit == 0.0) {
    return v;
  }
  const double uniform_rate = 1.05 * max_exit;
  // Split [0, t] so each Poisson mean stays moderate; the semigroup property
  // makes the split exact, and the per-step tails add up to `tolerance`.
  constexpr double kMaxMeanPerStep = 10.0;
  const auto steps = static_cast<std::size_t>(std::ceil(uniform_rate * t / kMaxMeanPerStep));
  const double mean = uniform_rate * t / static_cast<double>(steps);
  const double step_tol = 0.5 * tolerance / static_cast<double>(steps);

  std::vector<double> term(n), next(n), acc(n);
  for (std::size_t step = 0; step < steps; ++step) {
    term = v;
    double weight = std::exp(-mean);
    double cumulative = weight;
    for (std::size_t i = 0; i < n; ++i) {
      acc[i] = weight * term[i];
    }
    for (std::size_t k = 1; 1.0 - cumulative > step_tol; ++k) {
      if (k > 100'000) {
        throw NumericalError("solve_distribution: uniformization series did not converge");
      }
      // term <- term * P with P = I + Q / uniform_rate
      for (std::size_t i = 0; i < n; ++i) {
        next[i] = term[i] * (1.0 - chain.exit_rate[i] / uniform_rate);
      }
      for (std::size_t i = 0; i < n; ++i) {
        if (term[i] == 0.0) {
          continue;
        }
        for (const auto& tr : chain.transitions[i]) {
          next[tr.to] += term[i] * tr.rate / uniform_rate;
        }
      }
      term.swap(next);
      weight *= mean / static_cast<double>(k);
      cumulative += weight;
      for (std::size_t i = 0; i < n; ++i) {
        acc[i] += weight * term[i];
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      v[i] = std::max(acc[i], 0.0) / cumulative;
    }
  }
  return v;
}

GillespieResult gillespie_run_counted(const EnergyVector& initial, double horizon, RngStream& rng) {
  if (!(horizon >= 0.0) || !std::isfinite(horizon)) {
    throw std::invalid_argument("gillespie_run: horizon must be finite and nonnegative");
  }
  GillespieResult out;
  EnergyVector e = initial;
  out.path.clock = Clock::Macro;
  out.path.horizon = horizon;
  out.path.times.push_back(0.0);
  out.path.values.push_back(e);
  if (e.size() < 2) {
    return out;
  }
  std::vector<double> rates(e.size() - 1);
  double t = 0.0;
  for (;;) {
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < e.size(); ++k) {
      rates[k] = rate_gamma(e[k], e[k + 1]);
      total += rates[k];
    }
    t += rng.exponential(total);
    if (t > horizon) {
      break;
    }
    double target = rng.uniform() * total;
    std::size_t k = 0;
    while (k + 2 < e.size() && target >= rates[k]) {
      target -= rates[k];
      ++k;
    }
    ++out.swap_events;
    if (e[k] != e[k + 1]) {
      std::swap(e[k], e[k + 1]);
      out.path.times.push_back(t);
      out.path.values.push_back(e);
    }
  }
  return out;
}

EnergyPath gillespie_run(const EnergyVector& initial, double horizon, RngStream& rng) {
  return gillespie_run_counted(initial, horizon, rng).path;
}

SsepReport ssep_generator_check(const LimitChain& chain) {
  if (chain.states.empty()) {
    throw std::invalid_argument("ssep_generator_check: empty chain");
  }
  EnergyVector distinct = chain.states.front();
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() != 2) {
    std::ostringstream msg;
    msg << "ssep_generator_check: requires exactly two distinct energies, found " << distinct.size();
    throw std::invalid_argument(msg.str());
  }
  const double low = distinct[0];
  const double high = distinct[1];
  const double c = 0.5 * std::sqrt(2.0 * high);

  SsepReport report;
  report.rate = c;
  std::ostringstream detail;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    std::vector<bool> occupied;
    for (double e : chain.states[i]) {
      occupied.push_back(e == high);
    }
    std::map<std::size_t, double> ssep_row;
    double ssep_exit = 0.0;
    for (std::size_t k = 0; k + 1 < occupied.size(); ++k) {
      if (occupied[k] == occupied[k + 1]) {
        continue;
      }
      std::vector<bool> moved = occupied;
      std::swap(moved[k], moved[k + 1]);
      EnergyVector as_energies;
      for (bool o : moved) {
        as_energies.push_back(o ? high : low);
      }
      ssep_row[chain.index_of(as_energies)] += c;
      ssep_exit += c;
    }
    std::map<std::size_t, double> chain_row;
    for (const auto& tr : chain.transitions[i]) {
      chain_row[tr.to] += tr.rate;
    }
    if (chain_row != ssep_row || chain.exit_rate[i] != ssep_exit) {
      ++report.mismatches;
      detail << "row " << i << " differs; ";
    }
  }
  report.passed = report.mismatches == 0;
  report.detail = report.passed ? "generator equals the SSEP generator entry for entry" : detail.str();
  return report;
}

}  // namespace bchain::limit
