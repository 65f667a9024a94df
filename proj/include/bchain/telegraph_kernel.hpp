#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace bchain::telegraph {

/// Arguments of the single-cell transition kernel f(q, p, q', p', t).
struct KernelQuery {
  double q = 0.0;        // start position in [0, 1]
  double p = 1.0;        // start velocity, nonzero
  double q_prime = 0.0;  // end position in [0, 1]
  double p_prime = 1.0;  // end velocity, +-|p|
  double t = 1.0;        // elapsed time > 0
  double lambda = 1.0;   // flip rate > 0
};

struct FlowPoint {
  double q = 0.0;
  double p = 0.0;
};

/// Kernel split into the atom carried by the no-flip trajectory and the
/// bounded smooth part g (a density in q' for each end velocity sign).
struct KernelValue {
  double atom_weight = 0.0;
  FlowPoint atom_point;
  double smooth_density = 0.0;
};

/// Free flight with elastic walls at 0 and 1: q + p t folded by the
/// period-2 triangle map, the velocity sign flipping at every wall.
FlowPoint deterministic_flow(double q, double p, double t);

/// Density of the end position on the free line given exactly n >= 1 flips
/// in [0, t], started from (q, p). Nonzero only for |q' - q| <= |p| t and on
/// the velocity branch p' = p (n even) or p' = -p (n odd). Throws for n = 0,
/// whose contribution is the atom.
double rho_n(int n, const KernelQuery& query);

/// Largest flip count kept in the series: the Poisson(lambda t) tail beyond
/// it is below `truncation` (Chernoff bound).
int series_cutoff(double lambda_t, double truncation);

inline constexpr double kDefaultTruncation = 1e-10;

/// Reflected cell kernel: sum of rho over the even and odd images of q'.
KernelValue kernel_f(const KernelQuery& query, double truncation = kDefaultTruncation);

/// Points in (0, 1) where q' -> g(q, p, q', p', t) may jump: the folds of
/// q +- |p| t. Between consecutive breakpoints g is a polynomial in q'.
std::vector<double> smooth_breakpoints(double center, double reach);

/// Precomputed series for fixed (lambda, |p|, t): evaluates g quickly for
/// many (q, q') pairs.
class SmoothKernel {
 public:
  SmoothKernel(double lambda, double speed, double t, double truncation = kDefaultTruncation);

  /// g(q, sign*speed, q', sign'*speed, t).
  double operator()(double q, int sign, double q_prime, int sign_prime) const;
  /// Integral of g over q' in [0, 1] for the given end sign (Gauss-Legendre
  /// per polynomial piece).
  double mass(double q, int sign, int sign_prime) const;

  double lambda() const { return lambda_; }
  double speed() const { return speed_; }
  double t() const { return t_; }
  double atom_weight() const;

 private:
  double line_density(double displacement, int sign, bool same_branch) const;

  double lambda_, speed_, t_;
  double reach_;
  int n_max_;
  // log of Poisson weight times the rho_n normalization, indexed by n.
  std::vector<double> log_coeff_;
  std::vector<double> coeff_;
};

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// 30-point Gauss-Legendre rule on [a, b]; exact for polynomials of degree
/// up to 59.
QuadratureRule gauss_rule(double a, double b);

struct MixingCertificate {
  double t0 = 0.0;
  double lambda = 0.0;
  double speed = 0.0;
  std::size_t grid = 0;
  /// Minimum of g over the grid; a positive value is a Doeblin lower bound.
  double alpha = 0.0;
  /// Fitted c of C e^{-c t} from mixing_decay (0 when not requested).
  double decay_rate = 0.0;
};

/// Minimum of the smooth part over a cell-centred grid of (q, q') with all
/// four sign combinations.
MixingCertificate doeblin_scan(double lambda, double speed, double t0, std::size_t grid);

/// Distribution over (q-bin, sign) states: mass[bin] for sign +1 and
/// mass[n_bins + bin] for sign -1.
struct BinnedDistribution {
  std::size_t n_bins = 0;
  std::vector<double> mass;
};

/// Replaces a normalized distribution by the position-uniform,
/// sign-symmetric one with the same total mass (the energy marginal).
BinnedDistribution project_energy_marginal(const BinnedDistribution& dist);

struct DecayRow {
  double t = 0.0;
  double l1_distance = 0.0;
  double atom_weight = 0.0;
};

struct DecayTable {
  std::vector<DecayRow> rows;
  /// Least-squares slope of -log(distance) against t.
  double rate = 0.0;
  double log_prefactor = 0.0;
};

/// L1 distance between the law at time t started from the point mass (q0,
/// sign0 * speed) and its energy-marginal projection (uniform in q, 1/2 per
/// sign), for every t in `times`.
DecayTable mixing_decay(double lambda, double speed, double q0, int sign0, std::span<const double> times);

}  // namespace bchain::telegraph
