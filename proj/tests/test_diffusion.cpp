#include <cmath>
#include <numbers>

#include "doctest.h"
#include "hoplab/asymptotics.hpp"
#include "hoplab/diffusion.hpp"
#include "hoplab/walker.hpp"

using namespace hoplab;

namespace {

RateModel model(double alpha, double beta) {
  RateModel m;
  m.alpha = alpha;
  m.beta = beta;
  return m;
}

// ln E[exp(sqrt(Z))], Z ~ Exp(rate), by quadrature with the Gaussian peak
// factored out: -rate s^2 + s = 1/(4 rate) - rate (s - s*)^2 after s = sqrt(z).
double ln_exp_moment_sqrt_exponential(double rate) {
  const double speak = 1.0 / (2.0 * rate);
  const double width = 1.0 / std::sqrt(2.0 * rate);
  const double hi = speak + 60.0 * width;
  const int steps = 200000;
  const double h = hi / steps;
  double acc = 0.0;
  for (int i = 0; i <= steps; ++i) {
    const double s = i * h;
    const double w = (i == 0 || i == steps) ? 0.5 : 1.0;
    acc += w * 2.0 * rate * s * std::exp(-rate * (s - speak) * (s - speak));
  }
  return 1.0 / (4.0 * rate) + std::log(acc * h);
}

}  // namespace

TEST_CASE("nn analytic matches the closed forms") {
  const DiffusionEstimate lattice = nn_diffusion_analytic(
      SpacingLaw::deterministic(1.0), EnergyLaw::point_mass_zero(), model(1.0, 0.0), 1, 3);
  CHECK(lattice.value == doctest::Approx(2.0 / std::numbers::e).epsilon(1e-15));
  CHECK_FALSE(lattice.divergence_flag);

  // 2 E[Z]^2 / E[e^Z] = 2 (1/2)^2 / 2 = 1/4 for rate-2 exponential spacings.
  const DiffusionEstimate exp2 = nn_diffusion_analytic(
      SpacingLaw::exponential(2.0), EnergyLaw::point_mass_zero(), model(1.0, 0.0), 1, 5);
  CHECK(exp2.value == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("nn analytic flags divergent exponential moments") {
  for (const auto& law : {SpacingLaw::pareto(3.0), SpacingLaw::exponential(0.5)}) {
    const DiffusionEstimate est = nn_diffusion_analytic(
        law, EnergyLaw::point_mass_zero(), model(1.0, 0.0), 1000, 7);
    INFO(law.name());
    CHECK(est.divergence_flag);
    CHECK(est.value == 0.0);
  }
}

TEST_CASE("nn analytic cold-to-warm ratio sits between the sandwich bounds") {
  const SpacingLaw law = SpacingLaw::deterministic(1.0);
  const EnergyLaw energy = EnergyLaw::two_point(0.5);
  const double d0 =
      nn_diffusion_analytic(law, energy, model(1.0, 0.0), 1, 11).value;
  double prev = d0;
  for (double beta : {0.5, 1.0, 2.0}) {
    const double d = nn_diffusion_analytic(law, energy, model(1.0, beta), 1, 11).value;
    const double ratio = d / d0;
    // E[e^{beta u}] <= e^{2 c2 beta} and >= nu(|E| >= eps) e^{c1 eps beta}
    // with eps = 0.5, nu = 1 for the two-point law.
    CHECK(ratio >= std::exp(-2.0 * 2.0 * beta) * (1 - 1e-12));
    CHECK(ratio <= std::exp(-1.0 * 0.5 * beta) * (1 + 1e-12));
    CHECK(d < prev);
    prev = d;
  }
}

TEST_CASE("variational nn estimate matches the explicit formula") {
  const DiffusionEstimate est = variational_diffusion_estimate(
      SpacingSource(SpacingLaw::exponential(2.0)), EnergyLaw::point_mass_zero(),
      model(1.0, 0.0), 400, 50, EdgeSet::NnOnly, 13);
  CHECK(std::abs(est.value - 0.25) < 3 * est.std_error);
  CHECK(est.std_error < 0.02);
}

TEST_CASE("variational full dominates nn on every sample") {
  for (double beta : {0.0, 2.0}) {
    const DiffusionEstimate full = variational_diffusion_estimate(
        SpacingSource(SpacingLaw::exponential(2.0)), EnergyLaw::power_law(1.0),
        model(1.0, beta), 100, 10, EdgeSet::Full, 17);
    const DiffusionEstimate nn = variational_diffusion_estimate(
        SpacingSource(SpacingLaw::exponential(2.0)), EnergyLaw::power_law(1.0),
        model(1.0, beta), 100, 10, EdgeSet::NnOnly, 17);
    for (int s = 0; s < 10; ++s) CHECK(full.per_sample(s) >= nn.per_sample(s));
  }
}

TEST_CASE("variational estimates are nonincreasing in beta per sample") {
  Eigen::VectorXd prev;
  for (double beta : {0.0, 1.0, 2.0}) {
    const DiffusionEstimate est = variational_diffusion_estimate(
        SpacingSource(SpacingLaw::exponential(1.0)), EnergyLaw::power_law(1.0),
        model(1.0, beta), 60, 8, EdgeSet::Full, 19);
    if (prev.size() > 0)
      for (int s = 0; s < 8; ++s) CHECK(est.per_sample(s) <= prev(s) + 1e-12);
    prev = est.per_sample;
  }
}

TEST_CASE("zero-temperature estimates ignore the energy law") {
  const DiffusionEstimate a = variational_diffusion_estimate(
      SpacingSource(SpacingLaw::exponential(1.0)), EnergyLaw::power_law(1.0),
      model(1.0, 0.0), 80, 6, EdgeSet::Full, 23);
  const DiffusionEstimate b = variational_diffusion_estimate(
      SpacingSource(SpacingLaw::exponential(1.0)), EnergyLaw::two_point(0.5),
      model(1.0, 0.0), 80, 6, EdgeSet::Full, 23);
  for (int s = 0; s < 6; ++s)
    CHECK(a.per_sample(s) == doctest::Approx(b.per_sample(s)).epsilon(1e-14));
}

TEST_CASE("variational estimate requires two environment samples") {
  CHECK_THROWS_AS(variational_diffusion_estimate(
                      SpacingSource(SpacingLaw::exponential(1.0)),
                      EnergyLaw::point_mass_zero(), model(1.0, 0.0), 50, 1,
                      EdgeSet::Full, 29),
                  std::invalid_argument);
}

TEST_CASE("thinning bound with cutoff one reduces to the cold value") {
  const double beta = 1.0;
  const DiffusionEstimate bound =
      thinning_lower_bound(SpacingLaw::exponential(1.0), EnergyLaw::power_law(1.0),
                           model(1.0, 0.0), beta, 1.0, 100, 24, 31);
  CHECK(bound.nu_star == 1.0);
  const DiffusionEstimate cold = variational_diffusion_estimate(
      SpacingSource(SpacingLaw::exponential(1.0)), EnergyLaw::point_mass_zero(),
      model(1.0, 0.0), 100, 24, EdgeSet::Full, 37);
  const double rescaled = bound.value / std::exp(-4.0 * beta);
  const double err = std::hypot(bound.std_error / std::exp(-4.0 * beta), cold.std_error);
  CHECK(std::abs(rescaled - cold.value) < 3 * err);
}

TEST_CASE("thinning bound stays below the variational value") {
  const double beta = 2.0;
  const double e_star = thinning_cutoff_schedule(beta, 0.5, 1.0);
  const DiffusionEstimate bound =
      thinning_lower_bound(SpacingLaw::exponential(1.0), EnergyLaw::power_law(1.0),
                           model(0.5, 0.0), beta, e_star, 100, 30, 41);
  const DiffusionEstimate var = variational_diffusion_estimate(
      SpacingSource(SpacingLaw::exponential(1.0)), EnergyLaw::power_law(1.0),
      model(0.5, beta), 100, 30, EdgeSet::Full, 43);
  CHECK(bound.value <= var.value + 3 * std::hypot(bound.std_error, var.std_error));
  CHECK(bound.nn_floor > 0.0);
  CHECK(bound.exp_moment_estimate >= 1.0);
  // The explicit floor sits below the variational D* it bounds.
  const double dstar = bound.value / (bound.nu_star * std::exp(-4.0 * beta * e_star));
  CHECK(bound.nn_floor <=
        dstar + 3 * bound.std_error / (bound.nu_star * std::exp(-4.0 * beta * e_star)));
}

TEST_CASE("thinned exponential moment scaling") {
  // Bounded by a line through the origin at the sampled cutoffs.
  for (double nu : {0.5, 0.25, 0.125}) {
    Rng rng(47);
    const ThinnedSpacingSampler s(SpacingLaw::exponential(1.0), nu);
    double acc = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) acc += std::exp(std::pow(s.sample(rng), 0.5));
    const double ln_moment = std::log(acc / n);
    INFO("nu=", nu);
    CHECK(ln_moment <= 1.0 / nu);
  }

  // The exponent alpha/(1-alpha) = 1 emerges at small nu; there the thinned
  // law is exactly Exp(nu) and quadrature replaces Monte Carlo.
  Eigen::VectorXd x(3), y(3);
  int i = 0;
  for (double nu : {1e-2, 1e-3, 1e-4}) {
    x(i) = std::log(1.0 / nu);
    y(i) = std::log(ln_exp_moment_sqrt_exponential(nu));
    ++i;
  }
  const ScalingFit fit = scaling_fit(x, y);
  CHECK(std::abs(fit.slope - 1.0) <= 0.2);
}

TEST_CASE("certificate matches the deterministic series oracle") {
  const CertificateResult cert =
      subdiffusivity_certificate(SpacingLaw::deterministic(1.0), 1.0, 40, 16, 53);
  double direct = 0.0;
  for (int n = 0; n <= 40; ++n)
    for (int m = 0; m <= 40; ++m) direct += (1.0 + n + m) * std::exp(-(1.0 + n + m));
  for (int s = 0; s < cert.c1_samples.size(); ++s)
    CHECK(std::abs(cert.c1_samples(s) - direct) < 1e-8);
  CHECK(cert.mean_remainder_share < 1e-10);
  CHECK_FALSE(cert.divergent);
}

TEST_CASE("certificate separates light and heavy tails") {
  const CertificateResult light =
      subdiffusivity_certificate(SpacingLaw::exponential(2.0), 1.0, 40, 8000, 59);
  CHECK_FALSE(light.divergent);
  CHECK(light.doubling_ratios.maxCoeff() < 1.5);

  const CertificateResult heavy =
      subdiffusivity_certificate(SpacingLaw::exponential(0.5), 1.0, 40, 8000, 59);
  CHECK(heavy.divergent);
}

TEST_CASE("test function value bounds the variational estimate from above") {
  const double beta = 1.0;
  const DiffusionEstimate upper = test_function_upper_bound(
      SpacingLaw::exponential(2.0), EnergyLaw::power_law(1.0), model(1.0, 0.0), beta,
      0.5, 30.0, 4.0, 80, 61);
  const DiffusionEstimate var = variational_diffusion_estimate(
      SpacingSource(SpacingLaw::exponential(2.0)), EnergyLaw::power_law(1.0),
      model(1.0, beta), 200, 30, EdgeSet::Full, 67);
  CHECK(upper.value + 3 * std::hypot(upper.std_error, var.std_error) >= var.value);
  CHECK(upper.interior_vanished_fraction >= 0.0);
  CHECK(upper.interior_vanished_fraction <= 1.0);
}

TEST_CASE("test function g is capped and cancels interior points") {
  // Gaps: 1, 1, 8, 1, 1; with threshold 5 the anchor right of the origin is
  // the point at 2.
  const Environment env = Environment::from_points(
      {-3.0, 0.0, 1.0, 2.0, 10.0, 11.0, 12.0}, {0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0},
      SpacingLaw::deterministic(1.0), EnergyLaw::point_mass_zero(), 1, 12.0);
  const double g0 = detail::test_function_g(env, 1.0, 5.0, 10.0, 0.0);
  CHECK(g0 == 2.0);
  // Interior cancellation: y + g(tau_y) - g(omega) = 0 for y between anchors.
  for (double y : {1.0, 2.0}) {
    const double gy = detail::test_function_g(env, 1.0, 5.0, 10.0, y);
    CHECK(y + gy - g0 == 0.0);
  }
  // The cap binds when no large gap appears within reach.
  const double capped = detail::test_function_g(env, 1.0, 50.0, 4.0, 0.0);
  CHECK(capped == 4.0);
  // g never exceeds the cap on random environments.
  const Environment random_env(SpacingLaw::exponential(1.0), EnergyLaw::power_law(1.0),
                               60.0, 71);
  for (double z : {-20.0, -5.0, 0.0, 3.0, 17.0}) {
    const double g = detail::test_function_g(random_env, 0.5, 2.0, 7.0, z);
    CHECK(g <= 7.0);
    CHECK(g >= 0.0);
  }
}

TEST_CASE("cross-method ordering holds at alpha one") {
  const SpacingLaw law = SpacingLaw::exponential(2.0);
  const EnergyLaw energy = EnergyLaw::power_law(1.0);
  for (double beta : {0.0, 1.0, 2.0}) {
    const DiffusionEstimate var = variational_diffusion_estimate(
        SpacingSource(law), energy, model(1.0, beta), 300, 40, EdgeSet::Full, 73);
    const DiffusionEstimate lower = thinning_lower_bound(
        law, energy, model(1.0, 0.0), beta, 0.5, 200, 30, 79);
    const DiffusionEstimate upper = test_function_upper_bound(
        law, energy, model(1.0, 0.0), beta, 0.5, 40.0, 4.0, 120, 83);
    INFO("beta=", beta);
    CHECK(lower.value <= var.value + 3 * std::hypot(lower.std_error, var.std_error));
    CHECK(var.value <= upper.value + 3 * std::hypot(var.std_error, upper.std_error));

    const MsdEstimate msd = msd_diffusion_estimate(law, energy, model(1.0, beta),
                                                   WalkKind::Vrh, 1500.0, 300, 89);
    CHECK(std::abs(msd.diffusion - var.value) <
          3 * std::hypot(msd.std_error, var.std_error));
  }
}
