#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "hoplab/finite_volume.hpp"

namespace hoplab {

enum class DiffusionMethod {
  VariationalFull,
  VariationalNn,
  NnAnalytic,
  Msd,
  UpperTestFunction,
  LowerThinning,
};

std::string method_name(DiffusionMethod m);

struct DiffusionEstimate {
  double value = 0.0;
  double std_error = 0.0;
  Eigen::VectorXd per_sample;
  int n_points = 0;  // ring size for variational methods
  double beta = 0.0;
  DiffusionMethod method = DiffusionMethod::NnAnalytic;
  bool divergence_flag = false;

  // Extras for the thinning lower bound.
  double nu_star = 1.0;
  double nn_floor = 0.0;            // 2 E[Z*]^2 / E[exp((Z*)^alpha)]
  double exp_moment_estimate = 0.0; // E-hat[exp((Z*)^alpha)]

  // Extras for the test-function upper bound.
  double interior_vanished_fraction = 0.0;
};

// D_kappa(beta) = 2 E[Z]^2 / E[1/r]; closed forms where catalogued, Monte
// Carlo otherwise. Divergent E[exp(Z^alpha)] (kappa = inf) gives value 0
// with the divergence flag set.
DiffusionEstimate nn_diffusion_analytic(const SpacingLaw& spacing, const EnergyLaw& energy,
                                        const RateModel& model, int samples,
                                        std::uint64_t seed);

// Mean over independently sampled periodized rings of the minimized
// quadratic form.
DiffusionEstimate variational_diffusion_estimate(const SpacingSource& spacing,
                                                 const EnergyLaw& energy,
                                                 const RateModel& model, int n,
                                                 int env_samples, EdgeSet edges,
                                                 std::uint64_t seed,
                                                 double eps_trunc = 1e-12);

// nu_star e^{-2 c2 beta E_star} D*, with D* the beta = 0 variational value on
// the thinned process; also reports the explicit nearest-neighbor floor.
DiffusionEstimate thinning_lower_bound(const SpacingLaw& spacing, const EnergyLaw& energy,
                                       const RateModel& model, double beta, double e_star,
                                       int n, int env_samples, std::uint64_t seed,
                                       int mc_samples = 20000);

// Monte Carlo value of the explicit test-function objective; an upper bound
// on D(beta) up to sampling error.
DiffusionEstimate test_function_upper_bound(const SpacingLaw& spacing,
                                            const EnergyLaw& energy, const RateModel& model,
                                            double beta, double e_star, double n, double a,
                                            int env_samples, std::uint64_t seed);

// E_*(beta) schedule used by the scaling experiments.
double thinning_cutoff_schedule(double beta, double alpha, double delta);

struct CertificateResult {
  Eigen::VectorXi sample_counts;    // s, 2s, 4s, 8s
  Eigen::VectorXd running_means;    // running mean of 1/C1
  Eigen::VectorXd doubling_ratios;
  double mean_remainder_share = 0.0;  // declared truncation remainder / C1
  bool divergent = false;
  Eigen::VectorXd c1_samples;
};

// Finite-truncation certificate for the subdiffusive dichotomy: C1 is the
// double sum over 0 <= n,m <= order of (1+n+m) exp(-(Z_0 + S_n + S'_m)^alpha);
// divergence is flagged when the running mean of 1/C1 grows by the given
// factor across a sample-count doubling.
CertificateResult subdiffusivity_certificate(const SpacingLaw& spacing, double alpha,
                                             int order, int samples, std::uint64_t seed,
                                             double growth_threshold = 1.5);

namespace detail {
// g(tau_z omega) for the explicit test function: scan the thinned points at
// or after z for the first gap >= threshold, capped at `cap`.
double test_function_g(const Environment& env, double e_star, double gap_threshold,
                       double cap, double z);
}  // namespace detail

}  // namespace hoplab
