#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "hoplab/point_process.hpp"

namespace hoplab {

struct ExtremeSequences {
  double a = 0.0;       // upper envelope a(t)
  double b = 0.0;       // lower envelope b(t)
  double alpha_t = 0.0; // quantile alpha_t = inf{y : psi(y) <= 1/t}
};

// Law-specific envelope sequences for the running maximum of spacings, and
// the quantile alpha_t. Throws for the deterministic law (psi hits 0) and
// for t too small for the logarithms.
ExtremeSequences extreme_sequences(const SpacingLaw& law, double p, double t);

// Numeric inversion of psi; agrees with the closed forms for continuous laws.
double alpha_quantile_numeric(const SpacingLaw& law, double t);

struct SeriesCheck {
  Eigen::VectorXd n_values;        // checkpoints
  Eigen::VectorXd partial_a;       // partial sums of psi(a(n))
  Eigen::VectorXd partial_b;       // partial sums of psi(b(n)) e^{-n psi(b(n))}
  bool a_converging = false;       // heuristic verdicts, not proofs
  bool b_converging = false;
};

SeriesCheck series_conditions_check(const SpacingLaw& law, double p, int n_max);

// Per-replica max of n i.i.d. spacings divided by alpha_n.
Eigen::VectorXd empirical_max_ratio(const SpacingLaw& law, int n, int replicas,
                                    std::uint64_t seed);

struct ScalingFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  int n_points = 0;
};

ScalingFit scaling_fit(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

// Closed-form exponents from the scaling laws.
double stretched_exponent(double alpha, double delta);     // delta a /(1-a+delta a)
double gap_cheeger_exponent(double lambda);                // -1 - 1/lambda
double weibull_critical_alpha(double tau);                 // alpha_c = tau

}  // namespace hoplab
