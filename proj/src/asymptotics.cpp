#include "hoplab/asymptotics.hpp"

#include <cmath>
#include <stdexcept>

#include "hoplab/parallel.hpp"

namespace hoplab {

namespace {

// Exponential-scale rate: exact for Exponential, the diluted-lattice
// correspondence for Geometric, the Weibull rate otherwise.
double exp_scale_rate(const SpacingLaw& law) {
  switch (law.kind()) {
    case SpacingKind::Exponential:
      return law.param1();
    case SpacingKind::Geometric:
      return -std::log1p(-law.param1());
    case SpacingKind::Weibull:
      return law.param1();
    case SpacingKind::HalfGaussian:
      return 1.0 / (2.0 * law.param1() * law.param1());
    default:
      throw std::logic_error("no exponential-scale rate for this law");
  }
}

// Stretch exponent tau in psi(t) ~ exp(-lambda t^tau).
double exp_scale_shape(const SpacingLaw& law) {
  switch (law.kind()) {
    case SpacingKind::Exponential:
    case SpacingKind::Geometric:
      return 1.0;
    case SpacingKind::Weibull:
      return law.param2();
    case SpacingKind::HalfGaussian:
      return 2.0;
    default:
      throw std::logic_error("no exponential-scale shape for this law");
  }
}

}  // namespace

ExtremeSequences extreme_sequences(const SpacingLaw& law, double p, double t) {
  if (law.kind() == SpacingKind::Deterministic)
    throw std::invalid_argument("extreme sequences undefined for a deterministic law");
  if (!(p > 1)) throw std::invalid_argument("extreme sequences need p > 1");
  const double log_t = std::log(t);
  const double loglog_t = log_t > 0 ? std::log(log_t) : -1.0;
  if (!(log_t > 0) || !(loglog_t > 0))
    throw std::invalid_argument("t too small for the envelope sequences");

  ExtremeSequences seq;
  if (law.kind() == SpacingKind::Pareto) {
    const double r = law.param1();
    seq.a = std::pow(t, 1.0 / r) * std::pow(log_t, p / r);
    const double inner = t / (p * loglog_t);
    if (!(inner > 1)) throw std::invalid_argument("t too small for b(t)");
    seq.b = std::pow(inner, 1.0 / r);
    seq.alpha_t = std::pow(t, 1.0 / r);
    return seq;
  }

  const double lam = exp_scale_rate(law);
  const double tau = exp_scale_shape(law);
  const double a_lin = std::log(t * std::pow(log_t, p)) / lam;
  const double b_arg = t / (p * loglog_t);
  if (!(b_arg > 1)) throw std::invalid_argument("t too small for b(t)");
  const double b_lin = std::log(b_arg) / lam;
  seq.a = std::pow(a_lin, 1.0 / tau);
  seq.b = std::pow(b_lin, 1.0 / tau);

  if (law.kind() == SpacingKind::Geometric) {
    // psi is a staircase; the infimum lands on an integer.
    seq.alpha_t = std::ceil(log_t / lam - 1e-12);
  } else if (law.kind() == SpacingKind::HalfGaussian) {
    seq.alpha_t = alpha_quantile_numeric(law, t);
  } else {
    seq.alpha_t = std::pow(log_t / lam, 1.0 / tau);
  }
  return seq;
}

double alpha_quantile_numeric(const SpacingLaw& law, double t) {
  if (law.kind() == SpacingKind::Deterministic)
    throw std::invalid_argument("quantile undefined for a deterministic law");
  if (!(t > 1)) throw std::invalid_argument("quantile needs t > 1");
  const double target = 1.0 / t;
  double lo = 0.0, hi = 1.0;
  while (law.survival(hi) > target && hi < 1e12) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (law.survival(mid) <= target ? hi : lo) = mid;
  }
  return hi;
}

SeriesCheck series_conditions_check(const SpacingLaw& law, double p, int n_max) {
  if (n_max < 100) throw std::invalid_argument("series check needs n_max >= 100");
  if (!(p > 0)) throw std::invalid_argument("series check needs p > 0");

  const int n_start = 16;  // first n with log log n > 0
  std::vector<double> ns, pa, pb;
  double sum_a = 0.0, sum_b = 0.0;
  double first_a = 0.0, last_a = 0.0, last_b = 0.0;
  const int mid_n = n_start + (n_max - n_start) / 2;
  double mid_a = 0.0, mid_b = 0.0;

  auto weight = [](double term, double n) {
    return term * n * std::pow(std::log(n), 1.05);
  };

  const int stride = std::max(1, (n_max - n_start) / 512);
  for (int n = n_start; n <= n_max; ++n) {
    const double log_n = std::log(static_cast<double>(n));
    const double loglog_n = std::log(log_n);
    const double b_inner = std::max(n / (p * loglog_n), 1.0);
    double term_a, term_b;
    if (law.kind() == SpacingKind::Pareto) {
      const double r = law.param1();
      term_a = law.survival(std::pow(n, 1.0 / r) * std::pow(log_n, p / r));
      term_b = law.survival(std::pow(b_inner, 1.0 / r));
    } else {
      const double lam = exp_scale_rate(law);
      const double tau = exp_scale_shape(law);
      term_a = law.survival(std::pow(std::log(n * std::pow(log_n, p)) / lam, 1.0 / tau));
      term_b = law.survival(std::pow(std::log(b_inner) / lam, 1.0 / tau));
    }
    sum_a += term_a;
    sum_b += term_b * std::exp(-n * term_b);
    if (n == n_start) first_a = weight(term_a, n);
    if (n == mid_n) {
      mid_a = weight(term_a, n);
      mid_b = weight(term_b * std::exp(-n * term_b), n);
    }
    if (n == n_max) {
      last_a = weight(term_a, n);
      last_b = weight(term_b * std::exp(-n * term_b), n);
    }
    if ((n - n_start) % stride == 0 || n == n_max) {
      ns.push_back(n);
      pa.push_back(sum_a);
      pb.push_back(sum_b);
    }
  }

  SeriesCheck out;
  out.n_values = Eigen::Map<const Eigen::VectorXd>(ns.data(), static_cast<long>(ns.size()));
  out.partial_a = Eigen::Map<const Eigen::VectorXd>(pa.data(), static_cast<long>(pa.size()));
  out.partial_b = Eigen::Map<const Eigen::VectorXd>(pb.data(), static_cast<long>(pb.size()));
  // Converging when the n (log n)^{1.05}-normalized terms still decay.
  out.a_converging = last_a < mid_a && mid_a < first_a;
  out.b_converging = last_b < mid_b;
  return out;
}

Eigen::VectorXd empirical_max_ratio(const SpacingLaw& law, int n, int replicas,
                                    std::uint64_t seed) {
  if (!law.unbounded())
    throw std::invalid_argument("max ratio needs a law with unbounded support");
  if (n < 1000) throw std::invalid_argument("max ratio needs n >= 1000");
  if (replicas < 1) throw std::invalid_argument("max ratio needs replicas >= 1");

  const double alpha_n = extreme_sequences(law, 2.0, static_cast<double>(n)).alpha_t;
  Eigen::VectorXd out(replicas);
  parallel_for(replicas, [&](int r) {
    Rng rng(derive_seed(seed, "max_ratio", static_cast<std::uint64_t>(r)));
    double best = 0.0;
    for (int i = 0; i < n; ++i) best = std::max(best, law.sample(rng));
    out(r) = best / alpha_n;
  });
  return out;
}

ScalingFit scaling_fit(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (x.size() != y.size()) throw std::invalid_argument("scaling fit needs matching sizes");
  if (x.size() < 3) throw std::invalid_argument("scaling fit needs at least 3 points");
  const double mx = x.mean(), my = y.mean();
  const Eigen::ArrayXd dx = x.array() - mx, dy = y.array() - my;
  const double sxx = dx.square().sum();
  if (!(sxx > 0)) throw std::invalid_argument("scaling fit needs non-degenerate x values");
  ScalingFit fit;
  fit.n_points = static_cast<int>(x.size());
  fit.slope = (dx * dy).sum() / sxx;
  fit.intercept = my - fit.slope * mx;
  const double ss_tot = dy.square().sum();
  const double ss_res = (dy - fit.slope * dx).square().sum();
  fit.r2 = ss_tot == 0.0 ? 1.0 : 1.0 - ss_res / ss_tot;
  return fit;
}

double stretched_exponent(double alpha, double delta) {
  if (!(alpha > 0 && alpha < 1)) throw std::invalid_argument("stretched exponent needs alpha in (0,1)");
  if (!(delta > 0)) throw std::invalid_argument("stretched exponent needs delta > 0");
  return delta * alpha / (1.0 - alpha + delta * alpha);
}

double gap_cheeger_exponent(double lambda) {
  if (!(lambda > 0)) throw std::invalid_argument("gap exponent needs lambda > 0");
  return -1.0 - 1.0 / lambda;
}

double weibull_critical_alpha(double tau) {
  if (!(tau > 0)) throw std::invalid_argument("critical alpha needs tau > 0");
  return tau;
}

}  // namespace hoplab
