#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "bchain/core.hpp"
#include "bchain/rng.hpp"

namespace bchain {

/// Event kinds in tie-break precedence order (lowest first).
enum class EventKind : std::uint8_t { Flip = 0, Collision = 1, WallLeft = 2, WallRight = 3 };

std::string to_string(EventKind kind);

/// `index` is the particle for Flip/WallLeft/WallRight and the left particle
/// of the pair (index, index + 1) for Collision. Indices are 0-based.
struct Event {
  EventKind kind = EventKind::Flip;
  std::size_t index = 0;
  double time = 0.0;

  friend bool operator==(const Event&, const Event&) = default;
};

/// Strict ordering used by the scheduler: time, then kind precedence, then index.
bool event_before(const Event& a, const Event& b);

struct CollisionRecord {
  double time = 0.0;          // micro time
  std::size_t pair = 0;       // 0-based left particle
  double e_before_left = 0.0;
  double e_before_right = 0.0;
};

struct CollisionLog {
  double epsilon = 0.0;
  /// Micro time up to which the log is complete.
  double horizon_micro = 0.0;
  std::vector<CollisionRecord> records;
};

std::size_t count_collisions(const CollisionLog& log, std::size_t pair);

struct EventCounts {
  std::array<std::uint64_t, 4> by_kind{};
  /// Number of events that shared their time with the next scheduled event.
  std::uint64_t ties = 0;

  std::uint64_t total() const { return by_kind[0] + by_kind[1] + by_kind[2] + by_kind[3]; }
  std::uint64_t of(EventKind k) const { return by_kind[static_cast<std::size_t>(k)]; }
};

/// Earliest pending event of a state by a full scan of all candidates.
Event next_event(const MicroState& s, const SystemConfig& config);

/// Applies `e` (which must be next_event(s)) to a copy of `s`: advances every
/// position linearly to e.time, then performs the velocity update.
MicroState apply_event(const MicroState& s, const Event& e, const SystemConfig& config, RngStream& rng);

/// Event-driven integrator. Candidates are kept in a priority queue; after an
/// event only the slots of the particles involved (and the pairs they belong
/// to) are rescheduled, and stale queue entries are dropped by version token.
/// Positions are stored lazily as (reference position, reference time).
class Simulator {
 public:
  Simulator(const SystemConfig& config, MicroState initial, RngStream rng);

  /// The event that step() would apply next.
  const Event& peek();
  /// Applies the next event and returns it.
  Event step();
  /// Applies all events with time <= t_micro, then moves the clock to t_micro.
  void advance_to(double t_micro);

  double time() const { return t_; }
  /// Materialized state at the current time.
  MicroState state() const;
  double energy(std::size_t k) const { return levels_.values[level_[k]]; }
  EnergyVector energies() const;
  const EventCounts& counts() const { return counts_; }
  const EnergyLevels& levels() const { return levels_; }
  const RngStream& rng() const { return rng_; }

 private:
  struct Entry {
    Event event;
    std::uint64_t token;
    std::size_t slot;
  };
  struct Later {
    bool operator()(const Entry& a, const Entry& b) const { return event_before(b.event, a.event); }
  };

  double position(std::size_t k, double t) const;
  void settle(std::size_t k);
  void schedule_flip(std::size_t k);
  void schedule_wall(std::size_t k);
  void schedule_pair(std::size_t k);
  void push(const Event& e, std::size_t slot);
  void drop_stale();

  SystemConfig config_;
  EnergyLevels levels_;
  RngStream rng_;
  std::size_t n_;
  double t_ = 0.0;
  std::vector<double> q_ref_;
  std::vector<double> t_ref_;
  std::vector<double> p_;
  std::vector<std::size_t> level_;
  std::vector<double> next_flip_;
  // Slots: [0, n) flips, [n, 2n) walls, [2n, 3n - 1) pairs.
  std::vector<std::uint64_t> version_;
  std::priority_queue<Entry, std::vector<Entry>, Later> queue_;
  EventCounts counts_;
};

struct RunOptions {
  /// Stop right after the first collision of any pair.
  bool stop_after_first_collision = false;
};

struct RunResult {
  EnergyPath path;  // macro clock
  CollisionLog log;
  EventCounts counts;
  MicroState final_state;
};

/// Simulates from a Gibbs-conditioned start until micro time
/// horizon_macro / epsilon. horizon_macro must lie in (0, 1].
RunResult run(const SystemConfig& config, double horizon_macro, RngStream& rng);

/// Same, from an explicit initial state and with no upper limit on the macro
/// horizon beyond finiteness. `rng` drives the flip clocks and is left at the
/// position after the last draw.
RunResult run_from(const SystemConfig& config, MicroState initial, double horizon_macro, RngStream& rng,
                   const RunOptions& options = {});

}  // namespace bchain
