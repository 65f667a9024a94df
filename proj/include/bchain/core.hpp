#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bchain/rng.hpp"

namespace bchain {

/// Invalid user-supplied parameters. The CLI maps this to exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string key, const std::string& reason)
      : std::invalid_argument(key + ": " + reason), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// A numerical contract could not be met (budget exhausted, state cap hit,
/// too few samples). The CLI maps this to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Broken internal consistency (stale event, negative gap). Always a bug.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

inline constexpr double kOrderingTolerance = 1e-12;
inline constexpr std::size_t kRejectionCap = 1'000'000;

using EnergyVector = std::vector<double>;

struct SystemConfig {
  std::size_t n_particles = 0;
  double epsilon = 0.0;
  double lambda = 1.0;
  /// Declared energy list e_1 < ... < e_N'. Empty means "the distinct values
  /// of `energies`".
  std::vector<double> energy_levels;
  /// Initial energy of each particle, one per particle.
  std::vector<double> energies;
  std::uint64_t seed = 1;
  std::size_t replicas = 1;

  /// Throws ConfigError naming the offending field.
  void validate() const;
  /// Same as validate() but admits epsilon == 0 (uncoupled cells).
  void validate_allow_uncoupled() const;
};

/// Lookup tables resolved from a config: energies and speeds per level, and
/// the level index of each particle's initial energy. Speeds are computed
/// once here; every velocity in the simulation is a signed copy of one of them.
struct EnergyLevels {
  std::vector<double> values;
  std::vector<double> speeds;
  std::vector<std::size_t> particle_level;

  std::size_t count() const { return values.size(); }
};

EnergyLevels resolve_levels(const SystemConfig& config);

/// Exact state of the event-driven chain. Positions are per-cell coordinates
/// in [0, 1]; `level[k]` indexes the energy table so that p[k] is always
/// +-speeds[level[k]] bit for bit.
struct MicroState {
  std::vector<double> q;
  std::vector<double> p;
  std::vector<std::size_t> level;
  double t = 0.0;
  std::vector<double> next_flip;

  std::size_t size() const { return q.size(); }
  EnergyVector energies(const EnergyLevels& levels) const;
};

enum class ViolationKind { OrderingConstraint, PositionOutOfCell, ZeroVelocity, EnergyNotInTable, SizeMismatch };

struct Violation {
  ViolationKind kind;
  std::size_t index;  // particle index, or left particle of the pair (0-based)
  double magnitude;
};

std::string to_string(ViolationKind kind);
std::string describe(const Violation& v);

/// Reports every violated MicroState invariant. Empty means valid.
std::vector<Violation> validate_state(const MicroState& s, const SystemConfig& config,
                                      double tolerance = kOrderingTolerance);

/// Samples the initial measure: positions uniform on the accessible set
/// {q in [0,1]^N : q[k+1] >= q[k] - 1 + epsilon} by rejection, independent
/// fair velocity signs, magnitudes from the configured energies, and one
/// Exponential(lambda) flip clock per particle.
MicroState sample_gibbs_conditioned(const SystemConfig& config, RngStream& rng);

/// Clock of an energy path: micro time, or macro time = epsilon * micro time.
enum class Clock { Micro, Macro };
std::string to_string(Clock clock);

/// Cadlag record of the energy vector. `times[0]` is the start of the record
/// (0) and `values[0]` the initial vector; every later entry is a jump.
struct EnergyPath {
  Clock clock = Clock::Macro;
  std::vector<double> times;
  std::vector<EnergyVector> values;
  /// End of the observation window on the same clock.
  double horizon = 0.0;

  std::size_t jump_count() const { return times.empty() ? 0 : times.size() - 1; }
  /// Value at time t (the last record with time <= t).
  const EnergyVector& value_at(double t) const;
};

/// True when `a` is a permutation of `b` with exactly equal entries.
bool same_multiset(EnergyVector a, EnergyVector b);

}  // namespace bchain
