#pragma once

#include <Eigen/Dense>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "hoplab/point_process.hpp"

namespace hoplab {

// Raised when a requested tolerance cannot be certified by the available
// window / truncation radius. The experiment runner treats it as fatal.
class TruncationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

double u_standard(double ei, double ej);

// Energy penalty u with its sandwich constants c1 <= c2 (Standard: 1, 2).
class UFunction {
 public:
  UFunction() = default;  // standard
  static UFunction standard();
  static UFunction custom(std::function<double(double, double)> fn, double c1, double c2);

  double operator()(double ei, double ej) const {
    return fn_ ? fn_(ei, ej) : u_standard(ei, ej);
  }
  bool is_standard() const { return !fn_; }
  double c1() const { return c1_; }
  double c2() const { return c2_; }

 private:
  std::function<double(double, double)> fn_;  // empty = standard
  double c1_ = 1.0;
  double c2_ = 2.0;
};

struct RateModel {
  double alpha = 1.0;
  double beta = 0.0;
  UFunction u;
  double kappa = std::numeric_limits<double>::infinity();  // nn truncation level

  void validate() const {
    if (!(alpha > 0)) throw std::invalid_argument("rate model needs alpha > 0");
    if (!(beta >= 0)) throw std::invalid_argument("rate model needs beta >= 0");
    if (!(kappa > 0)) throw std::invalid_argument("rate model needs kappa > 0");
  }
  RateModel with_beta(double b) const {
    RateModel m = *this;
    m.beta = b;
    return m;
  }
};

// c_{x_i,x_j} = exp(-|x_i-x_j|^alpha - beta u(E_i,E_j)); zero on the diagonal.
double jump_rate(const RateModel& model, double xi, double ei, double xj, double ej);

// Nearest-neighbor rate with the |x|^alpha exponent capped at kappa.
double nn_rate(const RateModel& model, double xi, double ei, double xj, double ej);

struct JumpDistribution {
  double total_rate = 0.0;
  double tail_bound = 0.0;            // certified bound on the omitted rate mass
  std::vector<int> targets;           // environment indices
  Eigen::VectorXd probabilities;      // aligned with targets, sums to 1
  double radius = 0.0;                // truncation radius actually used
};

// Truncated version of lambda_{x_i} = sum_j c_{x_i,x_j} together with the
// jump distribution c/lambda. Throws TruncationError when the window cannot
// certify tail_bound <= eps_trunc.
JumpDistribution total_rate_and_jump_dist(const RateModel& model, const Environment& env,
                                          int site, double eps_trunc);

// Upper bound on sum over points beyond distance r of exp(-d^alpha), assuming
// at most `per_unit` points in any unit interval (both sides included).
double rate_tail_majorant(double r, double alpha, double per_unit);

// Crude per-unit-length point count bound observed in the window.
double unit_interval_count_bound(const Environment& env);

struct UValidation {
  bool pass = true;
  double worst_violation = 0.0;
  double at_ei = 0.0, at_ej = 0.0;
  std::string reason;
};

UValidation validate_u(const std::function<double(double, double)>& u, double c1,
                       double c2, int grid);

}  // namespace hoplab
