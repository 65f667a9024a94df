#include "bchain/csv_io.hpp"

#include <array>
#include <charconv>

namespace bchain::csv {

std::string format_double(double x) {
  std::array<char, 32> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  if (ec != std::errc{}) {
    throw InternalError("format_double: buffer too small");
  }
  return std::string(buf.data(), end);
}

void write_collision_header(std::ostream& out) {
  out << "replica,clock,time,k,e_before_k,e_before_k1\n";
}

void write_collisions(std::ostream& out, std::size_t replica, const CollisionLog& log) {
  for (const auto& r : log.records) {
    out << replica << ",micro," << format_double(r.time) << ',' << (r.pair + 1) << ','
        << format_double(r.e_before_left) << ',' << format_double(r.e_before_right) << '\n';
  }
}

void write_path_header(std::ostream& out, std::size_t n_particles) {
  out << "replica,time";
  for (std::size_t k = 1; k <= n_particles; ++k) {
    out << ",e_" << k;
  }
  out << '\n';
}

void write_path(std::ostream& out, std::size_t replica, const EnergyPath& path) {
  for (std::size_t i = 0; i < path.times.size(); ++i) {
    out << replica << ',' << format_double(path.times[i]);
    for (double e : path.values[i]) {
      out << ',' << format_double(e);
    }
    out << '\n';
  }
}

void write_distribution(std::ostream& out, const std::vector<EnergyVector>& states,
                        std::span<const double> probabilities) {
  const std::size_t n = states.empty() ? 0 : states.front().size();
  out << "state_index";
  for (std::size_t k = 1; k <= n; ++k) {
    out << ",e_" << k;
  }
  out << ",probability\n";
  for (std::size_t i = 0; i < states.size(); ++i) {
    out << i;
    for (double e : states[i]) {
      out << ',' << format_double(e);
    }
    out << ',' << format_double(probabilities[i]) << '\n';
  }
}

void write_compare(std::ostream& out, std::span<const experiments::CompareRow> rows) {
  out << "epsilon,t,tv,ci\n";
  for (const auto& r : rows) {
    out << format_double(r.epsilon) << ',' << format_double(r.t) << ',' << format_double(r.tv) << ','
        << format_double(r.ci) << '\n';
  }
}

void write_rates(std::ostream& out, std::span<const experiments::RateRow> rows) {
  out << "epsilon,lambda,rate,ci_lo,ci_hi\n";
  for (const auto& r : rows) {
    out << format_double(r.epsilon) << ',' << format_double(r.lambda) << ',' << format_double(r.estimate.rate)
        << ',' << format_double(r.estimate.ci_lo) << ',' << format_double(r.estimate.ci_hi) << '\n';
  }
}

void write_recollisions(std::ostream& out, std::span<const experiments::RecollisionRow> rows) {
  out << "epsilon,ratio_label,fraction,ci\n";
  for (const auto& r : rows) {
    out << format_double(r.epsilon) << ',' << r.report.ratio_label << ',' << format_double(r.report.fraction)
        << ',' << format_double(r.report.ci_half) << '\n';
  }
}

}  // namespace bchain::csv
