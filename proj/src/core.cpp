#include "bchain/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace bchain {

namespace {

void validate_common(const SystemConfig& c, bool allow_uncoupled) {
  if (c.n_particles == 0) {
    throw ConfigError("n_particles", "must be a positive integer");
  }
  if (!std::isfinite(c.epsilon) || c.epsilon >= 0.5 ||
      (allow_uncoupled ? c.epsilon < 0.0 : c.epsilon <= 0.0)) {
    std::ostringstream msg;
    msg << "must satisfy 0 < epsilon < 1/2, got " << c.epsilon;
    throw ConfigError("epsilon", msg.str());
  }
  if (!std::isfinite(c.lambda) || c.lambda <= 0.0) {
    throw ConfigError("lambda", "flip rate must be positive and finite");
  }
  if (c.energies.size() != c.n_particles) {
    std::ostringstream msg;
    msg << "expected " << c.n_particles << " entries (n_particles), got " << c.energies.size();
    throw ConfigError("energies", msg.str());
  }
  for (double e : c.energies) {
    if (!std::isfinite(e) || e <= 0.0) {
      throw ConfigError("energies", "every energy must be positive and finite");
    }
  }
  if (!c.energy_levels.empty()) {
    for (std::size_t i = 0; i < c.energy_levels.size(); ++i) {
      if (!(c.energy_levels[i] > 0.0) || !std::isfinite(c.energy_levels[i])) {
        throw ConfigError("energy_levels", "every level must be positive and finite");
      }
      if (i > 0 && !(c.energy_levels[i - 1] < c.energy_levels[i])) {
        throw ConfigError("energy_levels", "levels must be strictly increasing");
      }
    }
    for (double e : c.energies) {
      if (!std::binary_search(c.energy_levels.begin(), c.energy_levels.end(), e)) {
        std::ostringstream msg;
        msg << "value " << e << " is not in energy_levels";
        throw ConfigError("energies", msg.str());
      }
    }
  }
  if (c.replicas == 0) {
    throw ConfigError("replicas", "must be a positive integer");
  }
}

}  // namespace

void SystemConfig::validate() const { validate_common(*this, false); }

void SystemConfig::validate_allow_uncoupled() const { validate_common(*this, true); }

EnergyLevels resolve_levels(const SystemConfig& config) {
  EnergyLevels out;
  if (config.energy_levels.empty()) {
    out.values = config.energies;
    std::sort(out.values.begin(), out.values.end());
    out.values.erase(std::unique(out.values.begin(), out.values.end()), out.values.end());
  } else {
    out.values = config.energy_levels;
  }
  out.speeds.reserve(out.values.size());
  for (double e : out.values) {
    out.speeds.push_back(std::sqrt(2.0 * e));
  }
  out.particle_level.reserve(config.energies.size());
  for (double e : config.energies) {
    auto it = std::lower_bound(out.values.begin(), out.values.end(), e);
    if (it == out.values.end() || *it != e) {
      throw ConfigError("energies", "value not in the energy table");
    }
    out.particle_level.push_back(static_cast<std::size_t>(it - out.values.begin()));
  }
  return out;
}

EnergyVector MicroState::energies(const EnergyLevels& levels) const {
  EnergyVector e(level.size());
  for (std::size_t k = 0; k < level.size(); ++k) {
    e[k] = levels.values.at(level[k]);
  }
  return e;
}

std::string to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::OrderingConstraint: return "ordering";
    case ViolationKind::PositionOutOfCell: return "position_out_of_cell";
    case ViolationKind::ZeroVelocity: return "zero_velocity";
    case ViolationKind::EnergyNotInTable: return "energy_not_in_table";
    case ViolationKind::SizeMismatch: return "size_mismatch";
  }
  return "unknown";
}

std::string describe(const Violation& v) {
  std::ostringstream out;
  out << to_string(v.kind) << " at index " << v.index << " (magnitude " << v.magnitude << ")";
  return out.str();
}

std::vector<Violation> validate_state(const MicroState& s, const SystemConfig& config,
                                      double tolerance) {
  std::vector<Violation> report;
  const std::size_t n = s.q.size();
  if (s.p.size() != n || s.level.size() != n || s.next_flip.size() != n ||
      n != config.n_particles) {
    report.push_back({ViolationKind::SizeMismatch, 0, static_cast<double>(n)});
    return report;
  }
  const EnergyLevels levels = resolve_levels(config);
  for (std::size_t k = 0; k < n; ++k) {
    if (s.q[k] < -tolerance) {
      report.push_back({ViolationKind::PositionOutOfCell, k, -s.q[k]});
    } else if (s.q[k] > 1.0 + tolerance) {
      report.push_back({ViolationKind::PositionOutOfCell, k, s.q[k] - 1.0});
    }
    if (s.p[k] == 0.0) {
      report.push_back({ViolationKind::ZeroVelocity, k, 0.0});
    }
    if (s.level[k] >= levels.count()) {
      report.push_back({ViolationKind::EnergyNotInTable, k, static_cast<double>(s.level[k])});
    } else if (s.p[k] != 0.0 && std::abs(s.p[k]) != levels.speeds[s.level[k]]) {
      report.push_back(
          {ViolationKind::EnergyNotInTable, k, std::abs(std::abs(s.p[k]) - levels.speeds[s.level[k]])});
    }
  }
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double bound = s.q[k] - 1.0 + config.epsilon;
    const double deficit = bound - s.q[k + 1];
    if (deficit > tolerance) {
      report.push_back({ViolationKind::OrderingConstraint, k, deficit});
    }
  }
  return report;
}

MicroState sample_gibbs_conditioned(const SystemConfig& config, RngStream& rng) {
  config.validate_allow_uncoupled();
  const EnergyLevels levels = resolve_levels(config);
  const std::size_t n = config.n_particles;

  MicroState s;
  s.q.assign(n, 0.0);
  bool accepted = false;
  for (std::size_t attempt = 0; attempt < kRejectionCap && !accepted; ++attempt) {
    for (std::size_t k = 0; k < n; ++k) {
      s.q[k] = rng.uniform();
    }
    accepted = true;
    for (std::size_t k = 0; k + 1 < n; ++k) {
      if (s.q[k + 1] < s.q[k] - 1.0 + config.epsilon) {
        accepted = false;
        break;
      }
    }
  }
  if (!accepted) {
    std::ostringstream msg;
    msg << "rejection sampling of initial positions accepted 0 of " << kRejectionCap
        << " proposals (acceptance rate below " << 1.0 / static_cast<double>(kRejectionCap)
        << ") for N=" << n << ", epsilon=" << config.epsilon;
    throw NumericalError(msg.str());
  }

  s.p.resize(n);
  s.level = levels.particle_level;
  for (std::size_t k = 0; k < n; ++k) {
    s.p[k] = rng.sign() * levels.speeds[s.level[k]];
  }
  s.t = 0.0;
  s.next_flip.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    s.next_flip[k] = rng.exponential(config.lambda);
  }
  return s;
}

std::string to_string(Clock clock) { return clock == Clock::Micro ? "micro" : "macro"; }

const EnergyVector& EnergyPath::value_at(double t) const {
  if (values.empty()) {
    throw std::out_of_range("EnergyPath::value_at: empty path");
  }
  if (t < times.front() || t > horizon) {
    throw std::out_of_range("EnergyPath::value_at: time outside the recorded window");
  }
  auto it = std::upper_bound(times.begin(), times.end(), t);
  return values[static_cast<std::size_t>(it - times.begin()) - 1];
}

bool same_multiset(EnergyVector a, EnergyVector b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return a == b;
}

}  // namespace bchain
