#pragma once

#include <cstddef>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "bchain/core.hpp"
#include "bchain/experiments.hpp"
#include "bchain/microsim.hpp"

namespace bchain::csv {

/// Bumped whenever a column is added, removed or reinterpreted.
inline constexpr int kSchemaVersion = 1;

/// Shortest decimal that parses back to the same double.
std::string format_double(double x);

/// Particle indices in CSV columns are 1-based (k, e_1, ...).
void write_collision_header(std::ostream& out);
void write_collisions(std::ostream& out, std::size_t replica, const CollisionLog& log);

void write_path_header(std::ostream& out, std::size_t n_particles);
/// One row per record, including the initial value at time 0.
void write_path(std::ostream& out, std::size_t replica, const EnergyPath& path);

void write_distribution(std::ostream& out, const std::vector<EnergyVector>& states,
                        std::span<const double> probabilities);

void write_compare(std::ostream& out, std::span<const experiments::CompareRow> rows);
void write_rates(std::ostream& out, std::span<const experiments::RateRow> rows);
void write_recollisions(std::ostream& out, std::span<const experiments::RecollisionRow> rows);

}  // namespace bchain::csv
