#include "bchain/microsim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace bchain {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Puts a colliding pair exactly on the contact manifold q[k+1] = q[k] - 1 + eps.
void clamp_onto_contact(double& left, double& right, double epsilon) {
  left = std::clamp(left, 0.0, 1.0);
  right = left - 1.0 + epsilon;
  if (right < 0.0) {
    right = 0.0;
    left = 1.0 - epsilon;
  }
}

void check_initial(const MicroState& s, const SystemConfig& config) {
  const auto report = validate_state(s, config);
  if (!report.empty()) {
    std::ostringstream msg;
    msg << "invalid initial state:";
    for (const auto& v : report) {
      msg << ' ' << describe(v) << ';';
    }
    throw std::invalid_argument(msg.str());
  }
}

}  // namespace

std::string to_string(EventKind kind) {
  switch (kind) {
    case EventKind::Flip: return "flip";
    case EventKind::Collision: return "collision";
    case EventKind::WallLeft: return "wall_left";
    case EventKind::WallRight: return "wall_right";
  }
  return "unknown";
}

bool event_before(const Event& a, const Event& b) {
  if (a.time != b.time) {
    return a.time < b.time;
  }
  if (a.kind != b.kind) {
    return a.kind < b.kind;
  }
  return a.index < b.index;
}

std::size_t count_collisions(const CollisionLog& log, std::size_t pair) {
  return static_cast<std::size_t>(std::count_if(log.records.begin(), log.records.end(),
                                                [pair](const CollisionRecord& r) { return r.pair == pair; }));
}

Event next_event(const MicroState& s, const SystemConfig& config) {
  const std::size_t n = s.size();
  Event best{EventKind::Flip, 0, kInf};
  bool found = false;
  auto consider = [&](const Event& e) {
    if (!found || event_before(e, best)) {
      best = e;
      found = true;
    }
  };
  for (std::size_t k = 0; k < n; ++k) {
    consider({EventKind::Flip, k, s.next_flip[k]});
    if (s.p[k] < 0.0) {
      consider({EventKind::WallLeft, k, s.t + s.q[k] / -s.p[k]});
    } else {
      consider({EventKind::WallRight, k, s.t + (1.0 - s.q[k]) / s.p[k]});
    }
  }
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (!(s.p[k] > s.p[k + 1])) {
      continue;
    }
    double gap = s.q[k + 1] - s.q[k] + 1.0 - config.epsilon;
    if (gap < -kOrderingTolerance) {
      std::ostringstream msg;
      msg << "negative gap " << gap << " at pair " << k;
      throw InternalError(msg.str());
    }
    gap = std::max(gap, 0.0);
    consider({EventKind::Collision, k, s.t + gap / (s.p[k] - s.p[k + 1])});
  }
  return best;
}

MicroState apply_event(const MicroState& s, const Event& e, const SystemConfig& config, RngStream& rng) {
  if (!(e == next_event(s, config))) {
    throw InternalError("apply_event: stale event " + to_string(e.kind));
  }
  MicroState out = s;
  const double dt = e.time - s.t;
  for (std::size_t j = 0; j < out.size(); ++j) {
    out.q[j] = std::clamp(out.q[j] + out.p[j] * dt, 0.0, 1.0);
  }
  out.t = e.time;
  const std::size_t k = e.index;
  switch (e.kind) {
    case EventKind::Flip:
      out.p[k] = -out.p[k];
      out.next_flip[k] = e.time + rng.exponential(config.lambda);
      break;
    case EventKind::WallLeft:
      out.q[k] = 0.0;
      out.p[k] = -out.p[k];
      break;
    case EventKind::WallRight:
      out.q[k] = 1.0;
      out.p[k] = -out.p[k];
      break;
    case EventKind::Collision:
      clamp_onto_contact(out.q[k], out.q[k + 1], config.epsilon);
      std::swap(out.p[k], out.p[k + 1]);
      std::swap(out.level[k], out.level[k + 1]);
      break;
  }
  return out;
}

Simulator::Simulator(const SystemConfig& config, MicroState initial, RngStream rng)
    : config_(config), levels_(resolve_levels(config)), rng_(rng), n_(config.n_particles) {
  config_.validate();
  check_initial(initial, config_);
  t_ = initial.t;
  q_ref_ = std::move(initial.q);
  t_ref_.assign(n_, t_);
  p_ = std::move(initial.p);
  level_ = std::move(initial.level);
  next_flip_ = std::move(initial.next_flip);
  version_.assign(3 * n_, 0);
  for (std::size_t k = 0; k < n_; ++k) {
    schedule_flip(k);
    schedule_wall(k);
  }
  for (std::size_t k = 0; k + 1 < n_; ++k) {
    schedule_pair(k);
  }
}

double Simulator::position(std::size_t k, double t) const { return q_ref_[k] + p_[k] * (t - t_ref_[k]); }

void Simulator::settle(std::size_t k) {
  q_ref_[k] = std::clamp(position(k, t_), 0.0, 1.0);
  t_ref_[k] = t_;
}

void Simulator::push(const Event& e, std::size_t slot) { queue_.push({e, version_[slot], slot}); }

void Simulator::schedule_flip(std::size_t k) {
  ++version_[k];
  push({EventKind::Flip, k, next_flip_[k]}, k);
}

void Simulator::schedule_wall(std::size_t k) {
  const std::size_t slot = n_ + k;
  ++version_[slot];
  if (p_[k] < 0.0) {
    push({EventKind::WallLeft, k, t_ref_[k] + q_ref_[k] / -p_[k]}, slot);
  } else {
    push({EventKind::WallRight, k, t_ref_[k] + (1.0 - q_ref_[k]) / p_[k]}, slot);
  }
}

void Simulator::schedule_pair(std::size_t k) {
  const std::size_t slot = 2 * n_ + k;
  ++version_[slot];
  if (!(p_[k] > p_[k + 1])) {
    return;
  }
  double gap = position(k + 1, t_) - position(k, t_) + 1.0 - config_.epsilon;
  if (gap < -kOrderingTolerance) {
    std::ostringstream msg;
    msg << "negative gap " << gap << " at pair " << k << ", t=" << t_;
    throw InternalError(msg.str());
  }
  gap = std::max(gap, 0.0);
  push({EventKind::Collision, k, t_ + gap / (p_[k] - p_[k + 1])}, slot);
}

void Simulator::drop_stale() {
  while (!queue_.empty() && queue_.top().token != version_[queue_.top().slot]) {
    queue_.pop();
  }
}

const Event& Simulator::peek() {
  drop_stale();
  if (queue_.empty()) {
    throw InternalError("Simulator: empty event queue");
  }
  return queue_.top().event;
}

Event Simulator::step() {
  const Event e = peek();
  queue_.pop();
  drop_stale();
  if (!queue_.empty() && queue_.top().event.time == e.time) {
    ++counts_.ties;
  }
  t_ = e.time;
  const std::size_t k = e.index;
  switch (e.kind) {
    case EventKind::Flip:
      settle(k);
      p_[k] = -p_[k];
      next_flip_[k] = t_ + rng_.exponential(config_.lambda);
      schedule_flip(k);
      break;
    case EventKind::WallLeft:
      q_ref_[k] = 0.0;
      t_ref_[k] = t_;
      p_[k] = -p_[k];
      break;
    case EventKind::WallRight:
      q_ref_[k] = 1.0;
      t_ref_[k] = t_;
      p_[k] = -p_[k];
      break;
    case EventKind::Collision:
      settle(k);
      settle(k + 1);
      clamp_onto_contact(q_ref_[k], q_ref_[k + 1], config_.epsilon);
      std::swap(p_[k], p_[k + 1]);
      std::swap(level_[k], level_[k + 1]);
      break;
  }
  ++counts_.by_kind[static_cast<std::size_t>(e.kind)];

  const std::size_t last = e.kind == EventKind::Collision ? k + 1 : k;
  for (std::size_t j = k; j <= last; ++j) {
    schedule_wall(j);
  }
  const std::size_t pair_lo = k > 0 ? k - 1 : 0;
  for (std::size_t j = pair_lo; j <= last && j + 1 < n_; ++j) {
    schedule_pair(j);
  }
  return e;
}

void Simulator::advance_to(double t_micro) {
  if (t_micro < t_) {
    throw std::invalid_argument("Simulator::advance_to: time moves backwards");
  }
  while (peek().time <= t_micro) {
    step();
  }
  t_ = t_micro;
}

MicroState Simulator::state() const {
  MicroState s;
  s.q.resize(n_);
  for (std::size_t k = 0; k < n_; ++k) {
    s.q[k] = std::clamp(position(k, t_), 0.0, 1.0);
  }
  s.p = p_;
  s.level = level_;
  s.t = t_;
  s.next_flip = next_flip_;
  return s;
}

EnergyVector Simulator::energies() const {
  EnergyVector e(n_);
  for (std::size_t k = 0; k < n_; ++k) {
    e[k] = levels_.values[level_[k]];
  }
  return e;
}

RunResult run_from(const SystemConfig& config, MicroState initial, double horizon_macro, RngStream& rng,
                   const RunOptions& options) {
  if (!std::isfinite(horizon_macro) || horizon_macro < 0.0) {
    throw ConfigError("horizon_macro", "must be finite and nonnegative");
  }
  Simulator sim(config, std::move(initial), rng);
  const double eps = config.epsilon;
  const double horizon_micro = horizon_macro / eps;

  RunResult result;
  result.path.clock = Clock::Macro;
  result.path.times.push_back(0.0);
  result.path.values.push_back(sim.energies());
  result.log.epsilon = eps;
  result.log.horizon_micro = horizon_micro;

  bool stopped_early = false;
  while (sim.peek().time <= horizon_micro) {
    const Event e = sim.peek();
    if (e.kind != EventKind::Collision) {
      sim.step();
      continue;
    }
    CollisionRecord rec{e.time, e.index, sim.energy(e.index), sim.energy(e.index + 1)};
    sim.step();
    result.log.records.push_back(rec);
    if (rec.e_before_left != rec.e_before_right) {
      result.path.times.push_back(std::min(e.time * eps, horizon_macro));
      result.path.values.push_back(sim.energies());
    }
    if (options.stop_after_first_collision) {
      result.log.horizon_micro = e.time;
      stopped_early = true;
      break;
    }
  }
  if (!stopped_early) {
    sim.advance_to(horizon_micro);
  }
  result.path.horizon = stopped_early ? std::min(sim.time() * eps, horizon_macro) : horizon_macro;
  result.counts = sim.counts();
  result.final_state = sim.state();
  rng = sim.rng();
  return result;
}

RunResult run(const SystemConfig& config, double horizon_macro, RngStream& rng) {
  config.validate();
  if (!(horizon_macro > 0.0 && horizon_macro <= 1.0)) {
    throw ConfigError("horizon_macro", "must lie in (0, 1]");
  }
  MicroState start = sample_gibbs_conditioned(config, rng);
  return run_from(config, std::move(start), horizon_macro, rng);
}

}  // namespace bchain
