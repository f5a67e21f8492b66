#include "hoplab/rates.hpp"

#include <algorithm>
#include <cmath>

namespace hoplab {

double u_standard(double ei, double ej) {
  if (std::abs(ei) > 1 || std::abs(ej) > 1)
    throw std::invalid_argument("energies must lie in [-1,1]");
  return std::abs(ei) + std::abs(ej) + std::abs(ei - ej);
}

UFunction UFunction::standard() { return UFunction(); }

UFunction UFunction::custom(std::function<double(double, double)> fn, double c1,
                            double c2) {
  if (!(c1 > 0 && c1 <= c2))
    throw std::invalid_argument("custom u needs 0 < c1 <= c2");
  UFunction u;
  u.fn_ = std::move(fn);
  u.c1_ = c1;
  u.c2_ = c2;
  return u;
}

double jump_rate(const RateModel& model, double xi, double ei, double xj, double ej) {
  model.validate();
  if (xi == xj) return 0.0;
  const double d = std::abs(xi - xj);
  return std::exp(-std::pow(d, model.alpha) - model.beta * model.u(ei, ej));
}

double nn_rate(const RateModel& model, double xi, double ei, double xj, double ej) {
  model.validate();
  const double d = std::abs(xi - xj);
  const double expo = std::min(std::pow(d, model.alpha), model.kappa);
  return std::exp(-expo - model.beta * model.u(ei, ej));
}

double rate_tail_majorant(double r, double alpha, double per_unit) {
  // 2 * per_unit * sum_{m>=0} exp(-(r+m)^alpha), with the series tail bounded
  // through the incomplete-gamma majorant of the integral.
  double sum = 0.0;
  double m = 0.0;
  double term = std::exp(-std::pow(r, alpha));
  while (term > 1e-22 && m < 1e6) {
    sum += term;
    m += 1.0;
    term = std::exp(-std::pow(r + m, alpha));
  }
  const double edge = r + m;
  const double tail =
      (2.0 / alpha) * std::pow(edge, 1.0 - alpha) * std::exp(-std::pow(edge, alpha));
  return 2.0 * per_unit * (sum + term + std::max(tail, 0.0));
}

double unit_interval_count_bound(const Environment& env) {
  // Sliding window over the sorted positions.
  const Eigen::VectorXd xs = env.positions();
  const int n = static_cast<int>(xs.size());
  int best = 1;
  int lo = 0;
  for (int hi = 0; hi < n; ++hi) {
    while (xs(hi) - xs(lo) > 1.0) ++lo;
    best = std::max(best, hi - lo + 1);
  }
  return static_cast<double>(best);
}

JumpDistribution total_rate_and_jump_dist(const RateModel& model, const Environment& env,
                                          int site, double eps_trunc) {
  model.validate();
  if (!(eps_trunc > 0)) throw std::invalid_argument("eps_trunc must be positive");
  if (site < env.min_index() || site > env.max_index())
    throw std::out_of_range("site outside environment");

  const double s = unit_interval_count_bound(env);
  double radius = std::pow(std::log(std::max(s, 1.0) * 8.0 / eps_trunc), 1.0 / model.alpha);
  double tail = rate_tail_majorant(radius, model.alpha, s);
  for (int i = 0; i < 200 && tail > eps_trunc; ++i) {
    radius *= 1.25;
    tail = rate_tail_majorant(radius, model.alpha, s);
  }
  if (tail > eps_trunc)
    throw TruncationError("cannot certify rate tail below eps_trunc");

  const double x0 = env.position(site);
  if (x0 - radius < env.covered_left() || x0 + radius > env.covered_right())
    throw TruncationError("environment window does not cover the truncation radius");

  JumpDistribution out;
  out.radius = radius;
  out.tail_bound = tail;
  const double e0 = env.energy(site);
  std::vector<double> rates;
  for (int k = env.min_index(); k <= env.max_index(); ++k) {
    if (k == site) continue;
    const double x = env.position(k);
    if (std::abs(x - x0) > radius) continue;
    const double c = jump_rate(model, x0, e0, x, env.energy(k));
    out.targets.push_back(k);
    rates.push_back(c);
    out.total_rate += c;
  }
  out.probabilities = Eigen::Map<const Eigen::VectorXd>(rates.data(),
                                                        static_cast<long>(rates.size()));
  out.probabilities /= out.total_rate;
  return out;
}

UValidation validate_u(const std::function<double(double, double)>& u, double c1,
                       double c2, int grid) {
  if (!(c1 > 0 && c1 <= c2))
    throw std::invalid_argument("validate_u needs 0 < c1 <= c2");
  if (grid < 2) throw std::invalid_argument("validate_u needs grid >= 2");

  UValidation v;
  for (int i = 0; i < grid; ++i) {
    for (int j = 0; j < grid; ++j) {
      const double a = -1.0 + 2.0 * i / (grid - 1);
      const double b = -1.0 + 2.0 * j / (grid - 1);
      const double uab = u(a, b);
      const double uba = u(b, a);
      const double sym = std::abs(uab - uba);
      const double lo = c1 * (std::abs(a) + std::abs(b)) - uab;
      const double hi = uab - c2 * (std::abs(a) + std::abs(b));
      const double tol = 1e-12;
      if (sym > tol && sym > v.worst_violation) {
        v = {false, sym, a, b, "asymmetric"};
      }
      if (lo > tol && lo > v.worst_violation) {
        v = {false, lo, a, b, "below c1 sandwich"};
      }
      if (hi > tol && hi > v.worst_violation) {
        v = {false, hi, a, b, "above c2 sandwich"};
      }
    }
  }
  return v;
}

}  // namespace hoplab
