#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "bchain/core.hpp"
#include "bchain/rng.hpp"

namespace bchain::limit {

/// Adjacent-swap rate of the limiting energy process, 1/macro time:
/// gamma(a, b) = max(sqrt(2a), sqrt(2b)) / 2.
double rate_gamma(double a, double b);

inline constexpr std::size_t kDefaultStateCap = 10'000;

struct Transition {
  std::size_t to = 0;
  double rate = 0.0;
  std::size_t pair = 0;  // swapped positions (pair, pair + 1)
};

/// Reachable orbit of an initial energy vector under adjacent swaps and the
/// generator of the limiting jump process on it. States are sorted
/// lexicographically. Swaps of equal energies are not self-loops here.
struct LimitChain {
  std::vector<EnergyVector> states;
  std::vector<std::vector<Transition>> transitions;
  /// -generator diagonal: total rate of visible transitions out of each state.
  std::vector<double> exit_rate;
  std::size_t initial = 0;

  std::size_t size() const { return states.size(); }
  /// Index of a state, or size() when absent.
  std::size_t index_of(const EnergyVector& e) const;
  /// Generator entry Q(i, j).
  double generator(std::size_t i, std::size_t j) const;
};

LimitChain build_chain(const EnergyVector& initial, std::size_t state_cap = kDefaultStateCap);

inline constexpr double kUniformizationTolerance = 1e-10;

/// Transient law at macro time t by uniformization with rate
/// 1.05 * max exit rate; the Poisson tail dropped is below `tolerance`.
std::vector<double> solve_distribution(const LimitChain& chain, double t,
                                       double tolerance = kUniformizationTolerance);

/// Jump-chain sample path on [0, horizon] (macro clock). The total rate
/// includes swaps of equal energies, which leave the recorded path unchanged.
EnergyPath gillespie_run(const EnergyVector& initial, double horizon, RngStream& rng);

/// Number of swap events (visible or not) of the last gillespie_run-style
/// path; returned alongside by gillespie_run_counted.
struct GillespieResult {
  EnergyPath path;
  std::size_t swap_events = 0;
};
GillespieResult gillespie_run_counted(const EnergyVector& initial, double horizon, RngStream& rng);

struct SsepReport {
  bool passed = false;
  double rate = 0.0;  // the constant SSEP swap rate gamma(a, b)
  std::size_t mismatches = 0;
  std::string detail;
};

/// With exactly two distinct energies a < b, compares the chain generator
/// entry by entry with the generator of the simple symmetric exclusion
/// process (site occupied iff it holds b) at constant rate gamma(a, b).
/// Throws std::invalid_argument when the number of distinct energies is not 2.
SsepReport ssep_generator_check(const LimitChain& chain);

}  // namespace bchain::limit
