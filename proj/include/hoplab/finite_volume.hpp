#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <variant>

#include "hoplab/rates.hpp"

namespace hoplab {

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class EdgeSet { Full, NnOnly };

// Periodized conductance network on a circle of circumference ell: minimal
// image distances, antisymmetric signed displacements d_ij = -d_ji.
struct FiniteVolumeProblem {
  Eigen::VectorXd position;      // N points on [0, ell)
  Eigen::VectorXd energy;
  double circumference = 0.0;
  Eigen::MatrixXd conductance;   // symmetric, zero diagonal
  Eigen::MatrixXd displacement;  // antisymmetric, |d| <= ell/2
  double omitted_mass = 0.0;     // total rate mass of dropped pairs
};

FiniteVolumeProblem build_finite_volume(const Environment& env, const RateModel& model,
                                        int n, double eps_trunc,
                                        EdgeSet edges = EdgeSet::Full);

// Same network built directly from n sampled spacings/marks (one ring).
// Spacing and energy streams are independent so matched-seed runs with
// different energy laws share the spacing draws.
using SpacingSource = std::variant<SpacingLaw, ThinnedSpacingSampler>;

double source_mean(const SpacingSource& source);
double sample_source(const SpacingSource& source, Rng& rng);

FiniteVolumeProblem sample_finite_volume(const SpacingSource& spacing,
                                         const EnergyLaw& energy, const RateModel& model,
                                         int n, double eps_trunc, EdgeSet edges,
                                         std::uint64_t seed);

struct CorrectorSolution {
  Eigen::VectorXd potential;  // g, with g_0 = 0
  double value = 0.0;         // (1/N) sum_{i != j} c_ij (d_ij + g_j - g_i)^2
  double residual = 0.0;      // relative linear-system residual
};

// Quadratic-form value for an arbitrary potential (g = 0 gives the
// uncorrected value).
double quadratic_value(const FiniteVolumeProblem& problem, const Eigen::VectorXd& g);

// Minimizes the periodized quadratic form: weighted-Laplacian solve with
// right-hand side -sum_j c_ij d_ij, gauge fixed by g_0 = 0.
CorrectorSolution solve_corrector(const FiniteVolumeProblem& problem, double tol = 1e-10);

// Explicit nearest-neighbor corrector chi(x_n) = sum (C / r_j - Z_j) with
// C = E[Z] / E[1/r]; x + chi is harmonic for the nn generator.
Eigen::VectorXd nn_corrector(const Environment& env, const RateModel& model,
                             int mc_samples = 200000);

// E[1 / r^{(kappa)}_{0,x_1}] under the given laws; closed form where
// available, Monte Carlo otherwise. Sets *diverged when E[exp(Z^alpha)]
// (kappa = inf) is infinite for the catalogued law.
double inverse_rate_mean(const SpacingLaw& spacing, const EnergyLaw& energy,
                         const RateModel& model, int samples, std::uint64_t seed,
                         bool* diverged = nullptr);

// Catalogued divergence of E[exp(Z^alpha)] for kappa = inf.
bool exp_moment_diverges(const SpacingLaw& law, double alpha);

}  // namespace hoplab
