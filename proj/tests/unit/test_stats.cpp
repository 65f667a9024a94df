#include <doctest.h>

#include <cmath>
#include <vector>

#include "bchain/experiments.hpp"
#include "bchain/limit_process.hpp"
#include "bchain/stats.hpp"

using namespace bchain;
using namespace bchain::stats;

namespace {

EnergyPath constant_path(EnergyVector v, double horizon) {
  EnergyPath p;
  p.times = {0.0};
  p.values = {std::move(v)};
  p.horizon = horizon;
  return p;
}

CollisionLog log_with(std::vector<double> times, double horizon_micro, double eps = 0.1) {
  CollisionLog log;
  log.epsilon = eps;
  log.horizon_micro = horizon_micro;
  for (double t : times) {
    log.records.push_back({t, 0, 0.5, 2.0});
  }
  return log;
}

SystemConfig two_particles(std::vector<double> energies, double eps, std::size_t replicas, std::uint64_t seed) {
  SystemConfig c;
  c.n_particles = 2;
  c.epsilon = eps;
  c.lambda = 1.0;
  c.energies = std::move(energies);
  c.replicas = replicas;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("tv_distance: hand examples and errors") {
  const std::vector<double> a{0.5, 0.5};
  const std::vector<double> b{1.0, 0.0};
  const std::vector<double> c{0.0, 1.0};
  CHECK(tv_distance(a, a) == 0.0);
  CHECK(tv_distance(b, c) == 1.0);
  CHECK(tv_distance(a, b) == 0.5);
  CHECK_THROWS_AS(tv_distance(a, std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("tv_distance is a metric on random triples") {
  RngStream rng(1, 0);
  auto random_law = [&] {
    std::vector<double> p(6);
    double sum = 0.0;
    for (auto& x : p) {
      x = rng.uniform();
      sum += x;
    }
    for (auto& x : p) {
      x /= sum;
    }
    return p;
  };
  for (int i = 0; i < 500; ++i) {
    const auto p = random_law();
    const auto q = random_law();
    const auto r = random_law();
    REQUIRE(tv_distance(p, q) == tv_distance(q, p));
    REQUIRE(tv_distance(p, r) <= tv_distance(p, q) + tv_distance(q, r) + 1e-15);
    REQUIRE(tv_distance(p, q) > 0.0);
    REQUIRE(tv_distance(p, q) <= 1.0);
  }
}

TEST_CASE("tv_distance between empirical laws aligns states") {
  EmpiricalDistribution p{{{1, 2}, {2, 1}}, {3, 1}, 4};
  EmpiricalDistribution q{{{2, 1}}, {2}, 2};
  CHECK(tv_distance(p, q) == doctest::Approx(0.75));
  CHECK(tv_distance(p, p) == 0.0);
  CHECK_THROWS_AS(tv_distance(p, {{1, 2}}, std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("empirical_distribution: point masses and errors") {
  std::vector<EnergyPath> paths;
  for (int i = 0; i < 10; ++i) {
    EnergyPath p = constant_path({1, 2}, 1.0);
    p.times.push_back(0.5);
    p.values.push_back({2, 1});
    paths.push_back(p);
  }
  const std::vector<EnergyVector> states{{1, 2}, {2, 1}};
  auto emp = empirical_distribution(paths, 0.0, states);
  CHECK(emp.counts == std::vector<std::size_t>{10, 0});
  CHECK(emp.total == 10);
  emp = empirical_distribution(paths, 0.5, states);
  CHECK(emp.counts == std::vector<std::size_t>{0, 10});
  CHECK(tv_ci_half_width(emp) == 0.0);

  CHECK_THROWS_AS(empirical_distribution(paths, 1.5, states), std::invalid_argument);
  CHECK_THROWS_AS(empirical_distribution(paths, 0.7, {{1, 2}}), std::invalid_argument);
  const auto observed = empirical_distribution(paths, 0.7);
  CHECK(observed.states == std::vector<EnergyVector>{{2, 1}});
}

TEST_CASE("empirical_distribution: all-equal energies stay a point mass") {
  auto c = two_particles({1.0, 1.0}, 0.05, 200, 3);
  const auto runs = experiments::simulate_replicas(c, 1.0, 1);
  std::vector<EnergyPath> paths;
  for (const auto& r : runs) {
    paths.push_back(r.path);
  }
  for (double t : {0.0, 0.3, 1.0}) {
    const auto emp = empirical_distribution(paths, t);
    CHECK(emp.states.size() == 1);
    CHECK(emp.counts[0] == 200);
  }
}

TEST_CASE("empirical_distribution: N = 2 swap probability at t = 0.5") {
  auto c = two_particles({0.5, 2.0}, 0.01, 100000, 4);
  const auto runs = experiments::simulate_replicas(c, 0.5, 0);
  std::vector<EnergyPath> paths;
  for (const auto& r : runs) {
    paths.push_back(r.path);
  }
  const auto emp = empirical_distribution(paths, 0.5, {{0.5, 2.0}, {2.0, 0.5}});
  const double p = (1.0 - std::exp(-1.0)) / 2.0;
  const double observed = static_cast<double>(emp.counts[1]) / static_cast<double>(emp.total);
  CHECK(std::abs(observed - p) < 3 * std::sqrt(p * (1 - p) / static_cast<double>(emp.total)));
}

TEST_CASE("tv_ci_half_width formula") {
  EmpiricalDistribution p{{{1}, {2}}, {25, 75}, 100};
  const double expected = 1.96 * 0.5 * 2 * std::sqrt(0.25 * 0.75 / 100);
  CHECK(tv_ci_half_width(p) == doctest::Approx(expected));
}

TEST_CASE("exponential_rate_fit recovers a known rate") {
  // Coverage over independent synthetic data sets, censored at 1.
  const double rate = 1.7;
  int covered = 0;
  const int sets = 400;
  for (int s = 0; s < sets; ++s) {
    RngStream rng(10, static_cast<std::uint64_t>(s));
    std::vector<WaitingTime> data;
    for (int i = 0; i < 2000; ++i) {
      const double w = rng.exponential(rate);
      data.push_back(w > 1.0 ? WaitingTime{1.0, true} : WaitingTime{w, false});
    }
    const RateEstimate est = exponential_rate_fit(data);
    covered += est.ci_lo <= rate && rate <= est.ci_hi;
  }
  const double coverage = static_cast<double>(covered) / sets;
  CHECK(coverage > 0.92);
  CHECK(coverage < 0.98);
}

TEST_CASE("exponential_rate_fit: too few events and bad input") {
  std::vector<WaitingTime> data(99, WaitingTime{0.5, false});
  data.push_back({1.0, true});
  CHECK_THROWS_AS(exponential_rate_fit(data), NumericalError);
  data.push_back({0.5, false});
  const RateEstimate est = exponential_rate_fit(data);
  CHECK(est.events == 100);
  CHECK(est.rate == doctest::Approx(100.0 / 51.0));
  CHECK(est.half_width() == doctest::Approx(1.96 * est.rate / 10.0));
  data.push_back({-1.0, false});
  CHECK_THROWS_AS(exponential_rate_fit(data), std::invalid_argument);
}

TEST_CASE("swap_rate_estimate uses macro time and censors empty logs") {
  std::vector<CollisionLog> logs;
  for (int i = 0; i < 150; ++i) {
    logs.push_back(log_with({5.0, 7.0}, 10.0));
  }
  for (int i = 0; i < 50; ++i) {
    logs.push_back(log_with({}, 10.0));
  }
  const RateEstimate est = swap_rate_estimate(logs);
  CHECK(est.events == 150);
  CHECK(est.exposure == doctest::Approx(150 * 0.5 + 50 * 1.0));
}

TEST_CASE("swap_rate_estimate: irrational velocity ratio collides at gamma") {
  auto c = two_particles({0.5, 1.0}, 0.01, 4000, 11);
  std::vector<CollisionLog> logs;
  for (const auto& r : experiments::simulate_replicas(c, 1.0, 0)) {
    logs.push_back(r.log);
  }
  const RateEstimate est = swap_rate_estimate(logs);
  const double expected = limit::rate_gamma(0.5, 1.0);
  CHECK(est.ci_lo <= expected);
  CHECK(expected <= est.ci_hi);
}

TEST_CASE("swap_rate_estimate: equal energies collide with a constant energy path") {
  const double a = 1.0;
  auto c = two_particles({a, a}, 0.01, 2000, 11);
  std::vector<CollisionLog> logs;
  std::size_t moved = 0;
  for (const auto& r : experiments::simulate_replicas(c, 1.0, 0)) {
    logs.push_back(r.log);
    moved += r.path.times.size() > 1 ? 1 : 0;
  }
  CHECK(moved == 0);
  const RateEstimate est = swap_rate_estimate(logs);
  CHECK(est.events >= 100);
  CHECK(est.rate > 0.0);
  // Velocity ratio 1 is rational: measured rate is reported, not compared to sqrt(2a)/2.
  MESSAGE("equal-energy first-collision rate " << est.rate << " vs sqrt(2a)/2 = " << std::sqrt(2 * a) / 2);
}

TEST_CASE("jump_count_tail") {
  std::vector<CollisionLog> logs;
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> times(static_cast<std::size_t>(i % 4), 1.0);
    logs.push_back(log_with(times, 10.0));
  }
  const std::vector<std::size_t> thresholds{0, 1, 2, 3, 4};
  const auto tail = jump_count_tail(logs, 0, thresholds);
  CHECK(tail == std::vector<double>{1.0, 0.75, 0.5, 0.25, 0.0});
  logs.pop_back();
  CHECK_THROWS_AS(jump_count_tail(logs, 0, thresholds), std::invalid_argument);
}

TEST_CASE("recollision_stats on hand-made logs") {
  const std::vector<CollisionLog> logs{log_with({1.0, 3.0, 10.0}, 20.0)};
  RecollisionReport r = recollision_stats(logs, 4.0, 0, "2");
  CHECK(r.collisions == 3);
  CHECK(r.recollisions == 1);
  CHECK(r.fraction == doctest::Approx(1.0 / 3.0));
  CHECK(r.ratio_label == "2");

  const std::vector<CollisionLog> short_logs{log_with({1.0, 3.0, 10.0}, 12.0)};
  r = recollision_stats(short_logs, 4.0);
  CHECK(r.collisions == 2);
  CHECK(r.recollisions == 1);

  r = recollision_stats(logs, 0.0);
  CHECK(r.fraction == 0.0);
  CHECK(r.recollisions == 0);
  CHECK_THROWS_AS(recollision_stats(logs, -1.0), std::invalid_argument);
}

TEST_CASE("recollision_stats: recollisions never exceed collisions") {
  auto c = two_particles({0.5, 2.0}, 0.04, 300, 12);
  std::vector<CollisionLog> logs;
  for (const auto& r : experiments::simulate_replicas(c, 1.0, 1)) {
    logs.push_back(r.log);
  }
  for (double w : {0.5, 4.0, 20.0}) {
    const auto r = recollision_stats(logs, w);
    CHECK(r.recollisions <= r.collisions);
  }
}
