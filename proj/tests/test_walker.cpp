#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "hoplab/finite_volume.hpp"
#include "hoplab/walker.hpp"

using namespace hoplab;

namespace {

Environment unit_lattice(double half_width, std::uint64_t seed) {
  return Environment(SpacingLaw::deterministic(1.0), EnergyLaw::point_mass_zero(),
                     half_width, seed);
}

double mean_holding_time(const Trajectory& t) {
  REQUIRE(t.points.size() > 2);
  double acc = 0.0;
  for (std::size_t i = 1; i < t.points.size(); ++i)
    acc += t.points[i].time - t.points[i - 1].time;
  return acc / static_cast<double>(t.points.size() - 1);
}

}  // namespace

TEST_CASE("trajectories start at the origin at time zero") {
  const Environment env = unit_lattice(5.0, 5);
  RateModel m;
  const Trajectory t = simulate_vrh(env, m, 10.0, 1e-9, 17);
  CHECK(t.points.front().time == 0.0);
  CHECK(t.points.front().index == 0);
  CHECK(t.points.front().position == 0.0);
  for (std::size_t i = 1; i < t.points.size(); ++i)
    CHECK(t.points[i].time > t.points[i - 1].time);
}

TEST_CASE("unit lattice holding times match the total-rate oracle") {
  const Environment env = unit_lattice(10.0, 7);
  RateModel m;  // alpha = 1, beta = 0
  const Trajectory t = simulate_vrh(env, m, 4000.0, 1e-9, 19);
  // lambda_0 = 2 sum e^{-n} = 2/(e-1); holding times are Exp(lambda_0).
  const double expect = (std::numbers::e - 1.0) / 2.0;
  const double k = static_cast<double>(t.points.size() - 1);
  const double se = expect / std::sqrt(k);
  CHECK(std::abs(mean_holding_time(t) - expect) < 3 * se);
}

TEST_CASE("unit lattice displacement is centered") {
  RateModel m;
  const int replicas = 400;
  const MsdEstimate est = msd_diffusion_estimate(
      SpacingLaw::deterministic(1.0), EnergyLaw::point_mass_zero(), m, WalkKind::Vrh,
      50.0, replicas, 23);
  const Eigen::VectorXd& x = est.terminal_displacements;
  const double sd = std::sqrt((x.array() - x.mean()).square().sum() / (replicas - 1));
  CHECK(std::abs(x.mean()) < 3 * sd / std::sqrt(static_cast<double>(replicas)));
}

TEST_CASE("nn trajectories only hop between consecutive indices") {
  const Environment env(SpacingLaw::exponential(1.0), EnergyLaw::power_law(1.0), 30.0, 29);
  RateModel m;
  m.beta = 0.5;
  const Trajectory t = simulate_nn(env, m, 500.0, 31);
  for (std::size_t i = 1; i < t.points.size(); ++i)
    CHECK(std::abs(t.points[i].index - t.points[i - 1].index) == 1);
}

TEST_CASE("nn walk on the unit lattice is symmetric") {
  const Environment env = unit_lattice(10.0, 37);
  RateModel m;
  const Trajectory t = simulate_nn(env, m, 4000.0, 41);
  long up = 0, total = 0;
  for (std::size_t i = 1; i < t.points.size(); ++i) {
    up += t.points[i].index > t.points[i - 1].index;
    ++total;
  }
  const double se = 0.5 / std::sqrt(static_cast<double>(total));
  CHECK(std::abs(static_cast<double>(up) / total - 0.5) < 3 * se);
}

TEST_CASE("truncated nn rates slow the clock") {
  const Environment env = unit_lattice(10.0, 43);
  RateModel m;
  m.kappa = 0.5;  // rate e^{-0.5} each side
  const Trajectory t = simulate_nn(env, m, 3000.0, 47);
  const double expect = 1.0 / (2.0 * std::exp(-0.5));
  const double k = static_cast<double>(t.points.size() - 1);
  CHECK(std::abs(mean_holding_time(t) - expect) < 3 * expect / std::sqrt(k));
}

TEST_CASE("vrh msd matches the lattice series oracle") {
  RateModel m;
  double series = 0.0;  // 2 sum n^2 e^{-n}
  for (int n = 1; n < 60; ++n) series += 2.0 * n * n * std::exp(-n);
  const MsdEstimate est = msd_diffusion_estimate(
      SpacingLaw::deterministic(1.0), EnergyLaw::point_mass_zero(), m, WalkKind::Vrh,
      30.0, 600, 53);
  CHECK(std::abs(est.diffusion - series) < 3 * est.std_error);
  CHECK(est.std_error < 0.3);
}

TEST_CASE("nn msd matches the explicit formula oracle") {
  RateModel m;
  const double expect = 2.0 * std::exp(-1.0);
  const MsdEstimate est = msd_diffusion_estimate(
      SpacingLaw::deterministic(1.0), EnergyLaw::point_mass_zero(), m, WalkKind::Nn,
      30.0, 600, 59);
  CHECK(std::abs(est.diffusion - expect) < 3 * est.std_error);
}

TEST_CASE("msd estimate requires at least two replicas") {
  RateModel m;
  CHECK_THROWS_AS(msd_diffusion_estimate(SpacingLaw::deterministic(1.0),
                                         EnergyLaw::point_mass_zero(), m, WalkKind::Vrh,
                                         10.0, 1, 61),
                  std::invalid_argument);
}

TEST_CASE("jump-chain fluxes are symmetric on a periodized environment") {
  RateModel m;
  m.beta = 1.0;
  const FiniteVolumeProblem p = sample_finite_volume(
      SpacingSource(SpacingLaw::exponential(1.0)), EnergyLaw::power_law(1.0), m, 24,
      1e-12, EdgeSet::Full, 67);
  const int n = static_cast<int>(p.position.size());

  // Row-wise cumulative samplers for the embedded jump chain.
  std::vector<std::vector<double>> cumulative(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
      acc += p.conductance(i, j);
      cumulative[static_cast<std::size_t>(i)].push_back(acc);
    }
  }

  Rng rng(71);
  Eigen::MatrixXd flux = Eigen::MatrixXd::Zero(n, n);
  int site = 0;
  const int steps = 400000;
  for (int s = 0; s < steps; ++s) {
    const auto& row = cumulative[static_cast<std::size_t>(site)];
    const double u = rng.uniform() * row.back();
    const int next = static_cast<int>(
        std::lower_bound(row.begin(), row.end(), u) - row.begin());
    flux(site, next) += 1.0;
    site = next;
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double fij = flux(i, j), fji = flux(j, i);
      if (fij + fji < 50) continue;
      const double z = (fij - fji) / std::sqrt(fij + fji);
      CHECK(std::abs(z) < 5.0);
    }
}

TEST_CASE("nn walk is the adjacency-restricted engine") {
  const Environment env(SpacingLaw::exponential(2.0), EnergyLaw::power_law(1.0), 30.0, 73);
  RateModel m;
  m.beta = 0.7;
  const Trajectory a = simulate_nn(env, m, 200.0, 79);
  const Trajectory b = detail::simulate(env, m, 200.0, 1e-9, 79, 1, true);
  REQUIRE(a.points.size() == b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    CHECK(a.points[i].time == b.points[i].time);
    CHECK(a.points[i].index == b.points[i].index);
  }
}

TEST_CASE("vrh on a sparse lattice reduces to the nn walk") {
  // Spacing 8: the non-adjacent rate mass is an e^{-8} fraction, far below
  // the Monte Carlo resolution, so the two walks must agree statistically.
  const SpacingLaw law = SpacingLaw::deterministic(8.0);
  RateModel m;
  const MsdEstimate vrh = msd_diffusion_estimate(law, EnergyLaw::point_mass_zero(), m,
                                                 WalkKind::Vrh, 2000.0, 250, 83);
  const MsdEstimate nn = msd_diffusion_estimate(law, EnergyLaw::point_mass_zero(), m,
                                                WalkKind::Nn, 2000.0, 250, 89);
  const double err = std::hypot(vrh.std_error, nn.std_error);
  CHECK(std::abs(vrh.diffusion - nn.diffusion) < 3 * err);
}

TEST_CASE("large-horizon lattice displacement is near Gaussian") {
  RateModel m;
  const int replicas = 8000;
  const MsdEstimate est = msd_diffusion_estimate(
      SpacingLaw::deterministic(1.0), EnergyLaw::point_mass_zero(), m, WalkKind::Vrh,
      150.0, replicas, 97);
  const Eigen::ArrayXd x = est.terminal_displacements.array();
  const double mean = x.mean();
  const double var = (x - mean).square().mean();
  const double m4 = (x - mean).pow(4).mean();
  const double excess_kurtosis = m4 / (var * var) - 3.0;
  CHECK(std::abs(excess_kurtosis) < 0.2);
}
