#include "bchain/telegraph_kernel.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace bchain::telegraph {

namespace {

constexpr double kLn2 = 0.69314718055994530942;

void require_positive_time(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw std::invalid_argument("telegraph kernel: elapsed time must be positive and finite");
  }
}

void require_rate(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("telegraph kernel: flip rate must be positive and finite");
  }
}

int sign_of(double x) { return x > 0.0 ? 1 : -1; }

// Image shifts k with |±q' + k - q| possibly <= reach.
void image_range(double reach, long& k_lo, long& k_hi) {
  k_lo = static_cast<long>(std::floor(-reach)) - 3;
  k_hi = static_cast<long>(std::ceil(reach)) + 3;
}

}  // namespace

FlowPoint deterministic_flow(double q, double p, double t) {
  const double y = q + p * t;
  double m = std::fmod(y, 2.0);
  if (m < 0.0) {
    m += 2.0;
  }
  if (m <= 1.0) {
    return {m, p};
  }
  return {2.0 - m, -p};
}

double rho_n(int n, const KernelQuery& query) {
  if (n <= 0) {
    throw std::invalid_argument("rho_n: n must be >= 1; the n = 0 term is the atom");
  }
  require_positive_time(query.t);
  const double p = query.p;
  const double pt = p * query.t;
  const double displacement = query.q_prime - query.q;
  if (std::abs(displacement) > std::abs(pt)) {
    return 0.0;
  }
  const bool same_sign = sign_of(query.p_prime) == sign_of(p);
  const bool even = n % 2 == 0;
  if (even != same_sign) {
    return 0.0;
  }
  const double z = displacement / pt;
  const double a = even ? n / 2 : (n - 1) / 2;
  const double b = even ? n / 2 - 1 : (n - 1) / 2;
  // n! (1+z)^a (1-z)^b / (|p| t 2^n a! b!)
  const double log_norm = std::lgamma(n + 1.0) - std::log(std::abs(pt)) - n * kLn2 - std::lgamma(a + 1.0) -
                          std::lgamma(b + 1.0);
  return std::exp(log_norm) * std::pow(1.0 + z, a) * std::pow(1.0 - z, b);
}

int series_cutoff(double lambda_t, double truncation) {
  if (!(lambda_t > 0.0)) {
    return 1;
  }
  if (!(truncation > 0.0 && truncation < 1.0)) {
    throw std::invalid_argument("series_cutoff: truncation must lie in (0, 1)");
  }
  // P(N >= n) <= exp(-mu) (e mu / n)^n for n > mu.
  const double log_target = std::log(truncation);
  int n = std::max(2, static_cast<int>(std::ceil(lambda_t)) + 1);
  while (-lambda_t + n * (1.0 + std::log(lambda_t) - std::log(static_cast<double>(n))) >= log_target) {
    ++n;
  }
  return n - 1;
}

std::vector<double> smooth_breakpoints(double center, double reach) {
  std::vector<double> out;
  long k_lo, k_hi;
  image_range(reach + 1.0, k_lo, k_hi);
  for (double edge : {center - reach, center + reach}) {
    for (long j = k_lo; j <= k_hi; ++j) {
      for (double candidate : {edge + 2.0 * static_cast<double>(j), -edge + 2.0 * static_cast<double>(j)}) {
        if (candidate > 0.0 && candidate < 1.0) {
          out.push_back(candidate);
        }
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

KernelValue kernel_f(const KernelQuery& query, double truncation) {
  require_positive_time(query.t);
  require_rate(query.lambda);
  if (query.p == 0.0 || query.p_prime == 0.0) {
    throw std::invalid_argument("kernel_f: velocities must be nonzero");
  }
  if (std::abs(std::abs(query.p_prime) - std::abs(query.p)) > 1e-12 * std::abs(query.p)) {
    throw std::invalid_argument("kernel_f: |p'| must equal |p| (energy is conserved)");
  }
  if (query.q < 0.0 || query.q > 1.0 || query.q_prime < 0.0 || query.q_prime > 1.0) {
    throw std::invalid_argument("kernel_f: positions must lie in [0, 1]");
  }

  const double mu = query.lambda * query.t;
  const int n_max = series_cutoff(mu, truncation);
  const double reach = std::abs(query.p) * query.t;

  // Poisson-weighted rho on the line, n >= 1 only.
  auto rho_smooth = [&](double y, double p_end) {
    KernelQuery line = query;
    line.q_prime = y;
    line.p_prime = p_end;
    double sum = 0.0;
    for (int n = 1; n <= n_max; ++n) {
      const double value = rho_n(n, line);
      if (value != 0.0) {
        sum += std::exp(-mu + n * std::log(mu) - std::lgamma(n + 1.0)) * value;
      }
    }
    return sum;
  };

  long k_lo, k_hi;
  image_range(reach, k_lo, k_hi);
  double smooth = 0.0;
  for (long k = k_lo; k <= k_hi; ++k) {
    const double shift = static_cast<double>(k);
    if (k % 2 == 0) {
      smooth += rho_smooth(query.q_prime + shift, query.p_prime);
    } else {
      smooth += rho_smooth(1.0 - query.q_prime + shift, -query.p_prime);
    }
  }

  KernelValue out;
  out.atom_weight = std::exp(-mu);
  out.atom_point = deterministic_flow(query.q, query.p, query.t);
  out.smooth_density = smooth;
  return out;
}

SmoothKernel::SmoothKernel(double lambda, double speed, double t, double truncation)
    : lambda_(lambda), speed_(speed), t_(t), reach_(speed * t) {
  require_rate(lambda);
  require_positive_time(t);
  if (!(speed > 0.0)) {
    throw std::invalid_argument("SmoothKernel: speed must be positive");
  }
  const double mu = lambda * t;
  n_max_ = series_cutoff(mu, truncation);
  log_coeff_.assign(static_cast<std::size_t>(n_max_) + 1, 0.0);
  for (int n = 1; n <= n_max_; ++n) {
    const bool even = n % 2 == 0;
    const double a = even ? n / 2 : (n - 1) / 2;
    const double b = even ? n / 2 - 1 : (n - 1) / 2;
    // Poisson weight e^{-mu} mu^n / n! times rho_n's n! / (|p| t 2^n a! b!)
    log_coeff_[static_cast<std::size_t>(n)] =
        -mu + n * (std::log(mu) - kLn2) - std::log(reach_) - std::lgamma(a + 1.0) - std::lgamma(b + 1.0);
  }
  coeff_.resize(log_coeff_.size());
  std::transform(log_coeff_.begin(), log_coeff_.end(), coeff_.begin(), [](double x) { return std::exp(x); });
  coeff_[0] = 0.0;
}

double SmoothKernel::atom_weight() const { return std::exp(-lambda_ * t_); }

double SmoothKernel::line_density(double displacement, int sign, bool same_branch) const {
  if (std::abs(displacement) > reach_) {
    return 0.0;
  }
  const double z = displacement / (sign * reach_);
  const double w = (1.0 - z) * (1.0 + z);
  // odd n = 2m+1: (1-z^2)^m ; even n = 2m+2: (1+z)(1-z^2)^m
  double sum = 0.0;
  double power = 1.0;
  for (int n = same_branch ? 2 : 1; n <= n_max_; n += 2) {
    sum += coeff_[static_cast<std::size_t>(n)] * power;
    power *= w;
  }
  return same_branch ? (1.0 + z) * sum : sum;
}

double SmoothKernel::operator()(double q, int sign, double q_prime, int sign_prime) const {
  long k_lo, k_hi;
  image_range(reach_, k_lo, k_hi);
  double total = 0.0;
  for (long k = k_lo; k <= k_hi; ++k) {
    const double shift = static_cast<double>(k);
    if (k % 2 == 0) {
      total += line_density(q_prime + shift - q, sign, sign_prime == sign);
    } else {
      total += line_density(1.0 - q_prime + shift - q, sign, -sign_prime == sign);
    }
  }
  return total;
}

double SmoothKernel::mass(double q, int sign, int sign_prime) const {
  std::vector<double> cuts = smooth_breakpoints(q, reach_);
  cuts.insert(cuts.begin(), 0.0);
  cuts.push_back(1.0);
  // Polynomial degree per piece is at most n_max; 30-point rules are exact to 59.
  const int sub = std::max(1, (n_max_ + 58) / 59);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double h = (cuts[i + 1] - cuts[i]) / sub;
    for (int s = 0; s < sub; ++s) {
      const double a = cuts[i] + s * h;
      const QuadratureRule rule = gauss_rule(a, a + h);
      for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
        total += rule.weights[j] * (*this)(q, sign, rule.nodes[j], sign_prime);
      }
    }
  }
  return total;
}

QuadratureRule gauss_rule(double a, double b) {
  using Rule = boost::math::quadrature::gauss<double, 30>;
  const auto& x = Rule::abscissa();
  const auto& w = Rule::weights();
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  QuadratureRule rule;
  rule.nodes.reserve(30);
  rule.weights.reserve(30);
  for (std::size_t i = 0; i < x.size(); ++i) {
    rule.nodes.push_back(mid - half * x[i]);
    rule.weights.push_back(half * w[i]);
    rule.nodes.push_back(mid + half * x[i]);
    rule.weights.push_back(half * w[i]);
  }
  return rule;
}

MixingCertificate doeblin_scan(double lambda, double speed, double t0, std::size_t grid) {
  require_positive_time(t0);
  if (grid == 0) {
    throw std::invalid_argument("doeblin_scan: grid must be positive");
  }
  const SmoothKernel g(lambda, speed, t0);
  MixingCertificate cert;
  cert.t0 = t0;
  cert.lambda = lambda;
  cert.speed = speed;
  cert.grid = grid;
  double alpha = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid; ++i) {
    const double q = (static_cast<double>(i) + 0.5) / static_cast<double>(grid);
    for (std::size_t j = 0; j < grid; ++j) {
      const double qp = (static_cast<double>(j) + 0.5) / static_cast<double>(grid);
      for (int s : {1, -1}) {
        for (int sp : {1, -1}) {
          alpha = std::min(alpha, g(q, s, qp, sp));
        }
      }
    }
  }
  cert.alpha = alpha;
  return cert;
}

BinnedDistribution project_energy_marginal(const BinnedDistribution& dist) {
  if (dist.n_bins == 0 || dist.mass.size() != 2 * dist.n_bins) {
    throw std::invalid_argument("project_energy_marginal: expected 2 * n_bins masses");
  }
  double total = 0.0;
  for (double m : dist.mass) {
    if (m < 0.0 || !std::isfinite(m)) {
      throw std::invalid_argument("project_energy_marginal: masses must be nonnegative");
    }
    total += m;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("project_energy_marginal: distribution is not normalized");
  }
  BinnedDistribution out;
  out.n_bins = dist.n_bins;
  out.mass.assign(dist.mass.size(), 1.0 / static_cast<double>(dist.mass.size()));
  return out;
}

DecayTable mixing_decay(double lambda, double speed, double q0, int sign0, std::span<const double> times) {
  if (times.empty()) {
    throw std::invalid_argument("mixing_decay: empty time list");
  }
  for (std::size_t i = 0; i < times.size(); ++i) {
    require_positive_time(times[i]);
    if (i > 0 && !(times[i] > times[i - 1])) {
      throw std::invalid_argument("mixing_decay: times must be increasing");
    }
  }
  DecayTable table;
  for (double t : times) {
    const SmoothKernel g(lambda, speed, t);
    std::vector<double> cuts = smooth_breakpoints(q0, speed * t);
    cuts.insert(cuts.begin(), 0.0);
    cuts.push_back(1.0);
    // |g - 1/2| has kinks inside pieces; a fixed subdivision keeps them harmless.
    constexpr int kSub = 16;
    double l1 = 0.0;
    for (int sp : {1, -1}) {
      for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double h = (cuts[i + 1] - cuts[i]) / kSub;
        for (int s = 0; s < kSub; ++s) {
          const double a = cuts[i] + s * h;
          const QuadratureRule rule = gauss_rule(a, a + h);
          for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
            l1 += rule.weights[j] * std::abs(g(q0, sign0, rule.nodes[j], sp) - 0.5);
          }
        }
      }
    }
    const double atom = g.atom_weight();
    table.rows.push_back({t, atom + l1, atom});
  }
  // Least squares of log(distance) = log C - c t.
  const double n = static_cast<double>(table.rows.size());
  if (table.rows.size() >= 2) {
    double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    for (const auto& r : table.rows) {
      const double y = std::log(r.l1_distance);
      st += r.t;
      sy += y;
      stt += r.t * r.t;
      sty += r.t * y;
    }
    const double slope = (n * sty - st * sy) / (n * stt - st * st);
    table.rate = -slope;
    table.log_prefactor = (sy - slope * st) / n;
  }
  return table;
}

}  // namespace bchain::telegraph
