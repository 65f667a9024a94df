// Acceptance run: one PASS/FAIL line per criterion, exit code 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "bchain/core.hpp"
#include "bchain/experiments.hpp"
#include "bchain/limit_process.hpp"
#include "bchain/microsim.hpp"
#include "bchain/parallel.hpp"
#include "bchain/stats.hpp"
#include "bchain/telegraph_kernel.hpp"

using namespace bchain;

namespace {

const std::vector<double> kLadder{0.08, 0.04, 0.02, 0.01};
constexpr std::size_t kThreads = 0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double x, int precision = 4) {
  std::ostringstream s;
  s.precision(precision);
  s << x;
  return s.str();
}

/// values[j+1] <= values[j] + ci[j] + ci[j+1] for every step of the ladder.
bool monotone_within_ci(const std::vector<double>& values, const std::vector<double>& ci) {
  for (std::size_t j = 0; j + 1 < values.size(); ++j) {
    if (values[j + 1] > values[j] + ci[j] + ci[j + 1]) {
      return false;
    }
  }
  return true;
}

SystemConfig two_particles(double e1, double e2, double epsilon, double lambda, std::size_t replicas,
                           std::uint64_t seed) {
  SystemConfig c;
  c.n_particles = 2;
  c.epsilon = epsilon;
  c.lambda = lambda;
  c.energies = {e1, e2};
  c.replicas = replicas;
  c.seed = seed;
  return c;
}

Outcome criterion1() {
  SystemConfig c;
  c.n_particles = 4;
  c.epsilon = 0.02;
  c.lambda = 1.0;
  c.energies = {0.5, 0.5, 1.0, 2.0};
  const double horizon_micro = 1.0 / c.epsilon;
  struct Tally {
    std::uint64_t events = 0;
    std::uint64_t collisions = 0;
    std::uint64_t multiset_breaks = 0;
    std::uint64_t invalid_states = 0;
  };
  const auto tallies = map_replicas(1000, kThreads, [&](std::size_t r) {
    RngStream rng(101, r);
    MicroState start = sample_gibbs_conditioned(c, rng);
    Simulator sim(c, std::move(start), rng);
    const EnergyVector initial = sim.energies();
    Tally t;
    while (sim.peek().time <= horizon_micro) {
      const Event e = sim.step();
      ++t.events;
      t.collisions += e.kind == EventKind::Collision ? 1 : 0;
      if (!same_multiset(sim.energies(), initial)) {
        ++t.multiset_breaks;
      }
      if (!validate_state(sim.state(), c, kOrderingTolerance).empty()) {
        ++t.invalid_states;
      }
    }
    return t;
  });
  Tally sum;
  for (const auto& t : tallies) {
    sum.events += t.events;
    sum.collisions += t.collisions;
    sum.multiset_breaks += t.multiset_breaks;
    sum.invalid_states += t.invalid_states;
  }
  return {sum.multiset_breaks == 0 && sum.invalid_states == 0 && sum.collisions > 0,
          std::to_string(sum.events) + " events, " + std::to_string(sum.collisions) + " collisions, " +
              std::to_string(sum.multiset_breaks) + " multiset breaks, " + std::to_string(sum.invalid_states) +
              " invalid states"};
}

Outcome criterion2() {
  double worst = 0.0;
  for (double speed : {1.0, 2.0}) {
    for (double t : {0.1, 1.0, 10.0}) {
      const telegraph::SmoothKernel g(1.0, speed, t);
      for (double q : {0.0, 0.13, 0.5, 0.77, 1.0}) {
        for (int sign : {1, -1}) {
          const double total = g.atom_weight() + g.mass(q, sign, 1) + g.mass(q, sign, -1);
          worst = std::max(worst, std::abs(total - 1.0));
        }
      }
    }
  }
  return {worst < 1e-8, "max |mass - 1| = " + fmt(worst, 3)};
}

Outcome criterion3() {
  constexpr double kLambda = 1.0;
  constexpr double kT = 1.0;
  constexpr double kQ0 = 0.3;
  constexpr std::size_t kSamples = 1'000'000;
  constexpr std::size_t kBins = 100;

  // Single free particle through the event-driven simulator; epsilon only sets the clock.
  SystemConfig c;
  c.n_particles = 1;
  c.epsilon = 0.25;
  c.lambda = kLambda;
  c.energies = {0.5};
  struct Sample {
    bool flipped = false;
    std::size_t bin = 0;
  };
  const auto samples = map_replicas(kSamples, kThreads, [&](std::size_t r) {
    RngStream rng(303, r);
    MicroState s;
    s.q = {kQ0};
    s.p = {1.0};
    s.level = {0};
    s.next_flip = {rng.exponential(kLambda)};
    const RunResult res = run_from(c, std::move(s), kT * c.epsilon, rng);
    Sample out;
    out.flipped = res.counts.of(EventKind::Flip) > 0;
    const double q = res.final_state.q[0];
    const std::size_t qbin = std::min(kBins - 1, static_cast<std::size_t>(q * kBins));
    out.bin = (res.final_state.p[0] > 0 ? 0 : kBins) + qbin;
    return out;
  });
  std::vector<double> observed(2 * kBins, 0.0);
  for (const auto& s : samples) {
    if (s.flipped) {
      observed[s.bin] += 1.0;
    }
  }

  const telegraph::SmoothKernel g(kLambda, 1.0, kT);
  std::vector<double> cuts = telegraph::smooth_breakpoints(kQ0, kT);
  std::size_t within = 0;
  double worst_z = 0.0;
  for (int sign_prime : {1, -1}) {
    for (std::size_t b = 0; b < kBins; ++b) {
      const double lo = static_cast<double>(b) / kBins;
      const double hi = static_cast<double>(b + 1) / kBins;
      std::vector<double> edges{lo};
      for (double x : cuts) {
        if (x > lo && x < hi) {
          edges.push_back(x);
        }
      }
      edges.push_back(hi);
      double mass = 0.0;
      for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        const auto rule = telegraph::gauss_rule(edges[i], edges[i + 1]);
        for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
          mass += rule.weights[j] * g(kQ0, 1, rule.nodes[j], sign_prime);
        }
      }
      const double expected = mass * static_cast<double>(kSamples);
      const double se = std::sqrt(static_cast<double>(kSamples) * mass * (1.0 - mass));
      const double obs = observed[(sign_prime > 0 ? 0 : kBins) + b];
      const double z = se > 0.0 ? std::abs(obs - expected) / se : (obs == expected ? 0.0 : INFINITY);
      worst_z = std::max(worst_z, z);
      within += z <= 3.0 ? 1 : 0;
    }
  }
  const double share = static_cast<double>(within) / static_cast<double>(2 * kBins);
  return {share >= 0.97, std::to_string(within) + "/200 bins within 3 SE, max z = " + fmt(worst_z, 3)};
}

Outcome criterion4() {
  bool pass = true;
  std::string detail;
  const std::vector<double> times{1, 2, 3, 4, 5, 6, 7, 8};
  for (double speed : {1.0, 2.0}) {
    const auto cert = telegraph::doeblin_scan(1.0, speed, 2.0, 64);
    const auto decay = telegraph::mixing_decay(1.0, speed, 0.5, 1, times);
    const double l1_at_8 = decay.rows.back().l1_distance;
    pass = pass && cert.alpha > 0.0 && l1_at_8 < 1e-2 && decay.rate > 0.0;
    detail += "|p|=" + fmt(speed) + ": alpha=" + fmt(cert.alpha) + " L1(8)=" + fmt(l1_at_8, 3) +
              " c=" + fmt(decay.rate) + "; ";
  }
  return {pass, detail};
}

std::vector<experiments::RateRow> rate_ladder_rows() {
  const auto c = two_particles(0.5, 2.0, kLadder.front(), 1.0, 10'000, 505);
  return experiments::rate_sweep(c, kLadder, {1.0}, 1.0, kThreads);
}

Outcome criterion5(const std::vector<experiments::RateRow>& rows) {
  std::vector<double> dev;
  std::vector<double> ci;
  std::string detail;
  for (const auto& r : rows) {
    dev.push_back(std::abs(r.estimate.rate - 1.0));
    ci.push_back(r.estimate.half_width());
    detail += "eps=" + fmt(r.epsilon) + ": " + fmt(r.estimate.rate) + " +- " + fmt(r.estimate.half_width(), 2) +
              "; ";
  }
  const bool close = dev.back() <= 0.1;
  const bool trend = monotone_within_ci(dev, ci);
  return {close && trend, detail + (trend ? "trend ok" : "trend broken")};
}

Outcome criterion6() {
  const auto c = two_particles(0.5, 2.0, 0.01, 1.0, 10'000, 606);
  const auto rows = experiments::rate_sweep(c, {0.01}, {0.5, 1.0, 2.0}, 1.0, kThreads);
  bool overlap = true;
  std::string detail;
  for (const auto& a : rows) {
    detail += "lambda=" + fmt(a.lambda) + ": [" + fmt(a.estimate.ci_lo) + ", " + fmt(a.estimate.ci_hi) + "]; ";
    for (const auto& b : rows) {
      overlap = overlap && a.estimate.ci_lo <= b.estimate.ci_hi && b.estimate.ci_lo <= a.estimate.ci_hi;
    }
  }
  // Diagnostic only: the same sweep for the irrational speed ratio of energies (1/2, 1).
  const auto d = two_particles(0.5, 1.0, 0.01, 1.0, 10'000, 606);
  const auto dio = experiments::rate_sweep(d, {0.01}, {0.5, 1.0, 2.0}, 1.0, kThreads);
  detail += "diagnostic (1/2,1):";
  for (const auto& r : dio) {
    detail += " lambda=" + fmt(r.lambda) + " [" + fmt(r.estimate.ci_lo) + ", " + fmt(r.estimate.ci_hi) + "]";
  }
  return {overlap, detail};
}

Outcome criterion7() {
  SystemConfig c;
  c.n_particles = 3;
  c.epsilon = kLadder.front();
  c.lambda = 1.0;
  c.energies = {0.5, 1.0, 2.0};
  c.replicas = 100'000;
  c.seed = 707;
  const std::vector<double> t_list{0.25, 0.5};
  const auto rows = experiments::compare_ladder(c, kLadder, t_list, kThreads);
  bool pass = true;
  std::string detail;
  for (double t : t_list) {
    std::vector<double> tv;
    std::vector<double> ci;
    for (const auto& r : rows) {
      if (r.t == t) {
        tv.push_back(r.tv);
        ci.push_back(r.ci);
      }
    }
    const bool trend = monotone_within_ci(tv, ci);
    pass = pass && tv.size() == kLadder.size() && tv.back() < 0.05 && trend;
    detail += "t=" + fmt(t) + ": TV";
    for (std::size_t j = 0; j < tv.size(); ++j) {
      detail += " " + fmt(tv[j], 3);
    }
    detail += std::string(trend ? " (trend ok)" : " (trend broken)") + "; ";
  }
  return {pass, detail};
}

Outcome criterion8() {
  const double a = 0.5;
  const double b = 2.0;
  const auto four = limit::ssep_generator_check(limit::build_chain({a, b, b, a}));
  const auto two = limit::ssep_generator_check(limit::build_chain({a, b}));
  return {four.passed && two.passed && four.mismatches == 0 && two.mismatches == 0,
          "(a,b,b,a): " + std::to_string(four.mismatches) + " mismatches; (a,b): " +
              std::to_string(two.mismatches) + " mismatches"};
}

Outcome criterion9() {
  const auto chain2 = limit::build_chain({0.5, 2.0});
  const double gamma = limit::rate_gamma(0.5, 2.0);
  const std::size_t swapped = chain2.index_of({2.0, 0.5});
  double worst = 0.0;
  for (double t : {0.05, 0.25, 0.5, 1.0, 3.0}) {
    const auto dist = limit::solve_distribution(chain2, t);
    worst = std::max(worst, std::abs(dist[swapped] - 0.5 * (1.0 - std::exp(-2.0 * gamma * t))));
  }

  const EnergyVector initial{0.5, 1.0, 2.0};
  const auto chain3 = limit::build_chain(initial);
  const auto paths = map_replicas(100'000, kThreads, [&](std::size_t r) {
    RngStream rng(909, r);
    return limit::gillespie_run(initial, 0.5, rng);
  });
  double worst_tv = 0.0;
  for (double t : {0.25, 0.5}) {
    const auto emp = stats::empirical_distribution(paths, t, chain3.states);
    worst_tv = std::max(worst_tv, stats::tv_distance(emp, chain3.states, limit::solve_distribution(chain3, t)));
  }
  return {worst < 1e-10 && worst_tv < 0.01,
          "closed-form error " + fmt(worst, 3) + ", Gillespie TV " + fmt(worst_tv, 3)};
}

Outcome criterion10() {
  const auto rational = two_particles(0.5, 2.0, kLadder.front(), 1.0, 10'000, 1010);
  const auto diophantine = two_particles(0.5, 1.0, kLadder.front(), 1.0, 10'000, 1010);
  const auto rat_rows = experiments::recollision_sweep(rational, kLadder, 4.0, 1.0, kThreads);
  const auto dio_rows = experiments::recollision_sweep(diophantine, kLadder, 4.0, 1.0, kThreads);
  const auto& r = rat_rows.back().report;
  const auto& d = dio_rows.back().report;
  const bool separated = r.fraction - r.ci_half > d.fraction + d.ci_half;

  std::vector<double> frac;
  std::vector<double> ci;
  std::string detail = "ratio " + r.ratio_label + " vs " + d.ratio_label + " at eps=0.01: " + fmt(r.fraction) +
                       " +- " + fmt(r.ci_half, 2) + " vs " + fmt(d.fraction) + " +- " + fmt(d.ci_half, 2) +
                       "; diophantine ladder";
  for (const auto& row : dio_rows) {
    frac.push_back(row.report.fraction);
    ci.push_back(row.report.ci_half);
    detail += " " + fmt(row.report.fraction, 3);
  }
  const bool trend = monotone_within_ci(frac, ci);
  const bool endpoints = frac.back() + ci.back() < frac.front() - ci.front();
  return {separated && trend && endpoints, detail};
}

Outcome criterion11(const std::vector<experiments::RateRow>& rows) {
  constexpr double kC = 2.0;
  double worst = 0.0;
  for (const auto& r : rows) {
    for (std::size_t n = 1; n <= 10 && n < r.count_tail.size(); ++n) {
      worst = std::max(worst, static_cast<double>(n) * r.count_tail[n]);
    }
  }
  const bool complete = std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.count_tail.size() >= 11; });
  return {complete && worst <= kC, "max n*P(count >= n) = " + fmt(worst) + " (C = " + fmt(kC) + ")"};
}

}  // namespace

int main() {
  int failures = 0;
  const auto report = [&](int id, const std::function<Outcome()>& fn) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += o.pass ? 0 : 1;
    std::cout << "criterion " << id << ": " << (o.pass ? "PASS" : "FAIL") << " (" << fmt(secs, 3) << " s) "
              << o.detail << std::endl;
  };

  report(1, criterion1);
  report(2, criterion2);
  report(3, criterion3);
  report(4, criterion4);
  std::vector<experiments::RateRow> rate_rows;
  report(5, [&] {
    rate_rows = rate_ladder_rows();
    return criterion5(rate_rows);
  });
  report(6, criterion6);
  report(7, criterion7);
  report(8, criterion8);
  report(9, criterion9);
  report(10, criterion10);
  report(11, [&] { return criterion11(rate_rows); });
  std::cout << (failures == 0 ? "all criteria PASS" : std::to_string(failures) + " criteria FAIL") << std::endl;
  return failures == 0 ? 0 : 1;
}
