#include "hoplab/finite_volume.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <queue>

namespace hoplab {

namespace {

FiniteVolumeProblem assemble(Eigen::VectorXd position, Eigen::VectorXd energy,
                             double ell, const RateModel& model, double eps_trunc,
                             EdgeSet edges) {
  const int n = static_cast<int>(position.size());
  FiniteVolumeProblem p;
  p.position = std::move(position);
  p.energy = std::move(energy);
  p.circumference = ell;
  p.conductance = Eigen::MatrixXd::Zero(n, n);
  p.displacement = Eigen::MatrixXd::Zero(n, n);

  if (edges == EdgeSet::Full) {
    const double drop = eps_trunc / (static_cast<double>(n) * n);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        double d = p.position(j) - p.position(i);  // in [0, ell)
        if (d > ell / 2) d -= ell;                 // minimal image
        const double c =
            jump_rate(model, 0.0, p.energy(i), std::abs(d), p.energy(j));
        if (c < drop) {
          p.omitted_mass += 2.0 * c;
          continue;
        }
        p.conductance(i, j) = p.conductance(j, i) = c;
        p.displacement(i, j) = d;
        p.displacement(j, i) = -d;
      }
    }
  } else {
    // Ring edges only; displacement is the hop arc (= the spacing).
    for (int i = 0; i < n; ++i) {
      const int j = (i + 1) % n;
      const double z = (j == 0) ? ell - p.position(i) : p.position(j) - p.position(i);
      const double r = nn_rate(model, 0.0, p.energy(i), z, p.energy(j));
      p.conductance(i, j) = p.conductance(j, i) = r;
      p.displacement(i, j) = z;
      p.displacement(j, i) = -z;
    }
  }
  return p;
}

bool connected(const Eigen::MatrixXd& c) {
  const int n = static_cast<int>(c.rows());
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  std::queue<int> q;
  q.push(0);
  seen[0] = 1;
  int count = 1;
  while (!q.empty()) {
    const int i = q.front();
    q.pop();
    for (int j = 0; j < n; ++j) {
      if (!seen[static_cast<std::size_t>(j)] && c(i, j) > 0) {
        seen[static_cast<std::size_t>(j)] = 1;
        ++count;
        q.push(j);
      }
    }
  }
  return count == n;
}

}  // namespace

FiniteVolumeProblem build_finite_volume(const Environment& env, const RateModel& model,
                                        int n, double eps_trunc, EdgeSet edges) {
  model.validate();
  if (n < 3) throw std::invalid_argument("finite volume needs n >= 3");
  if (env.max_index() < n)
    throw std::invalid_argument("environment too small for requested finite volume");
  Eigen::VectorXd pos(n), en(n);
  for (int k = 0; k < n; ++k) {
    pos(k) = env.position(k);
    en(k) = env.energy(k);
  }
  const double ell = env.position(n);  // sum of the first n spacings
  return assemble(std::move(pos), std::move(en), ell, model, eps_trunc, edges);
}

double source_mean(const SpacingSource& source) {
  return std::visit([](const auto& s) { return s.mean(); }, source);
}

double sample_source(const SpacingSource& source, Rng& rng) {
  return std::visit([&](const auto& s) { return s.sample(rng); }, source);
}

FiniteVolumeProblem sample_finite_volume(const SpacingSource& spacing,
                                         const EnergyLaw& energy, const RateModel& model,
                                         int n, double eps_trunc, EdgeSet edges,
                                         std::uint64_t seed) {
  model.validate();
  if (n < 3) throw std::invalid_argument("finite volume needs n >= 3");
  Rng zrng(derive_seed(seed, "fv.spacing"));
  Rng erng(derive_seed(seed, "fv.energy"));
  Eigen::VectorXd pos(n), en(n);
  double x = 0.0;
  for (int k = 0; k < n; ++k) {
    pos(k) = x;
    x += sample_source(spacing, zrng);
    en(k) = energy.sample(erng);
  }
  return assemble(std::move(pos), std::move(en), x, model, eps_trunc, edges);
}

double quadratic_value(const FiniteVolumeProblem& p, const Eigen::VectorXd& g) {
  const int n = static_cast<int>(p.position.size());
  const Eigen::MatrixXd grad =
      g.transpose().replicate(n, 1) - g.replicate(1, n);  // grad_ij = g_j - g_i
  return (p.conductance.array() * (p.displacement + grad).array().square()).sum() / n;
}

CorrectorSolution solve_corrector(const FiniteVolumeProblem& p, double tol) {
  const int n = static_cast<int>(p.position.size());
  if (!connected(p.conductance)) throw SolverError("conductance graph is disconnected");

  Eigen::MatrixXd lap = -p.conductance;
  lap.diagonal() = p.conductance.rowwise().sum();
  // Stationarity of the quadratic form: (L g)_k = sum_j c_kj d_kj with the
  // d_kj = wrap(x_j - x_k) convention.
  const Eigen::VectorXd b =
      (p.conductance.array() * p.displacement.array()).rowwise().sum();

  // Pin g_0 = 0 and solve the reduced SPD system; a couple of refinement
  // passes push the residual to the requested tolerance despite the huge
  // dynamic range of the weights at large beta.
  const Eigen::MatrixXd a = lap.bottomRightCorner(n - 1, n - 1);
  const Eigen::VectorXd rhs = b.tail(n - 1);
  Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
  if (ldlt.info() != Eigen::Success) throw SolverError("LDLT factorization failed");

  Eigen::VectorXd g = ldlt.solve(rhs);
  const double bnorm = rhs.norm();
  double residual = bnorm == 0.0 ? 0.0 : (rhs - a * g).norm() / bnorm;
  for (int pass = 0; pass < 5 && residual > tol; ++pass) {
    g += ldlt.solve(rhs - a * g);
    residual = (rhs - a * g).norm() / bnorm;
  }
  if (!g.allFinite()) throw SolverError("corrector solve produced non-finite values");
  if (residual > tol) throw SolverError("corrector solve did not reach tolerance");

  CorrectorSolution sol;
  sol.potential = Eigen::VectorXd::Zero(n);
  sol.potential.tail(n - 1) = g;
  sol.residual = residual;
  sol.value = quadratic_value(p, sol.potential);
  return sol;
}

bool exp_moment_diverges(const SpacingLaw& law, double alpha) {
  switch (law.kind()) {
    case SpacingKind::Deterministic:
      return false;
    case SpacingKind::Exponential:
      return alpha > 1.0 || (alpha == 1.0 && law.param1() <= 1.0);
    case SpacingKind::Geometric: {
      const double lam = -std::log1p(-law.param1());
      return alpha > 1.0 || (alpha == 1.0 && lam <= 1.0);
    }
    case SpacingKind::Weibull:
      return alpha > law.param2() || (alpha == law.param2() && law.param1() <= 1.0);
    case SpacingKind::HalfGaussian: {
      const double lam = 1.0 / (2.0 * law.param1() * law.param1());
      return alpha > 2.0 || (alpha == 2.0 && lam <= 1.0);
    }
    case SpacingKind::Pareto:
      return true;
  }
  return true;
}

double inverse_rate_mean(const SpacingLaw& spacing, const EnergyLaw& energy,
                         const RateModel& model, int samples, std::uint64_t seed,
                         bool* diverged) {
  model.validate();
  if (diverged) *diverged = false;
  const bool truncated = std::isfinite(model.kappa);
  if (!truncated && exp_moment_diverges(spacing, model.alpha)) {
    if (diverged) *diverged = true;
    return std::numeric_limits<double>::infinity();
  }

  // Spacing factor E[exp(Z^alpha /\ kappa)].
  double zfactor;
  if (spacing.kind() == SpacingKind::Deterministic) {
    zfactor = std::exp(std::min(std::pow(spacing.param1(), model.alpha), model.kappa));
  } else if (spacing.kind() == SpacingKind::Exponential && model.alpha == 1.0 &&
             !truncated) {
    const double lam = spacing.param1();
    zfactor = lam / (lam - 1.0);
  } else {
    Rng rng(derive_seed(seed, "inv_rate.z"));
    double acc = 0.0;
    for (int i = 0; i < samples; ++i) {
      const double z = spacing.sample(rng);
      acc += std::exp(std::min(std::pow(z, model.alpha), model.kappa));
    }
    zfactor = acc / samples;
  }

  // Energy factor E[exp(beta u(E_0, E_1))]; u is bounded so this is finite.
  double efactor;
  if (model.beta == 0.0) {
    efactor = 1.0;
  } else if (energy.kind() == EnergyKind::PointMassZero && model.u.is_standard()) {
    efactor = 1.0;
  } else if (energy.kind() == EnergyKind::TwoPoint && model.u.is_standard()) {
    const double e = energy.param();
    efactor = 0.5 * std::exp(2.0 * model.beta * e) + 0.5 * std::exp(4.0 * model.beta * e);
  } else {
    Rng rng(derive_seed(seed, "inv_rate.e"));
    double acc = 0.0;
    for (int i = 0; i < samples; ++i) {
      const double e0 = energy.sample(rng);
      const double e1 = energy.sample(rng);
      acc += std::exp(model.beta * model.u(e0, e1));
    }
    efactor = acc / samples;
  }
  return zfactor * efactor;
}

Eigen::VectorXd nn_corrector(const Environment& env, const RateModel& model,
                             int mc_samples) {
  bool diverged = false;
  const double inv_rate = inverse_rate_mean(env.spacing_law(), env.energy_law(), model,
                                            mc_samples, derive_seed(env.seed(), "nn_corr"),
                                            &diverged);
  if (diverged) throw std::domain_error("E[1/r] diverges; nn corrector undefined");
  const double c = env.spacing_law().mean() / inv_rate;

  Eigen::VectorXd chi(env.point_count());
  const int m = env.min_index();
  auto slot = [&](int k) { return k - m; };
  chi(slot(0)) = 0.0;
  for (int k = 0; k < env.max_index(); ++k) {
    const double r = nn_rate(model, env.position(k), env.energy(k), env.position(k + 1),
                             env.energy(k + 1));
    const double z = env.position(k + 1) - env.position(k);
    chi(slot(k + 1)) = chi(slot(k)) + c / r - z;
  }
  for (int k = 0; k > env.min_index(); --k) {
    const double r = nn_rate(model, env.position(k - 1), env.energy(k - 1),
                             env.position(k), env.energy(k));
    const double z = env.position(k) - env.position(k - 1);
    chi(slot(k - 1)) = chi(slot(k)) - (c / r - z);
  }
  return chi;
}

}  // namespace hoplab
