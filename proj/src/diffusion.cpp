#include "hoplab/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "hoplab/parallel.hpp"

namespace hoplab {

namespace {

void mean_and_stderr(const Eigen::VectorXd& v, double* mean, double* se) {
  const double m = v.mean();
  *mean = m;
  *se = v.size() < 2 ? 0.0
                     : std::sqrt((v.array() - m).square().sum() /
                                 (static_cast<double>(v.size()) - 1.0) / v.size());
}

}  // namespace

std::string method_name(DiffusionMethod m) {
  switch (m) {
    case DiffusionMethod::VariationalFull:
      return "variational_full";
    case DiffusionMethod::VariationalNn:
      return "variational_nn";
    case DiffusionMethod::NnAnalytic:
      return "nn_analytic";
    case DiffusionMethod::Msd:
      return "msd";
    case DiffusionMethod::UpperTestFunction:
      return "upper_test_function";
    case DiffusionMethod::LowerThinning:
      return "lower_thinning";
  }
  return "?";
}

DiffusionEstimate nn_diffusion_analytic(const SpacingLaw& spacing, const EnergyLaw& energy,
                                        const RateModel& model, int samples,
                                        std::uint64_t seed) {
  model.validate();
  if (samples < 1) throw std::invalid_argument("nn_diffusion_analytic needs samples >= 1");
  DiffusionEstimate est;
  est.method = DiffusionMethod::NnAnalytic;
  est.beta = model.beta;

  bool diverged = false;
  const double inv_rate = inverse_rate_mean(spacing, energy, model, samples,
                                            derive_seed(seed, "nn_analytic"), &diverged);
  if (diverged) {
    est.value = 0.0;
    est.divergence_flag = true;
    return est;
  }
  const double mu = spacing.mean();
  est.value = 2.0 * mu * mu / inv_rate;

  // Delta-method error bar when the inverse-rate mean was sampled.
  const bool closed_z = spacing.kind() == SpacingKind::Deterministic ||
                        (spacing.kind() == SpacingKind::Exponential && model.alpha == 1.0 &&
                         !std::isfinite(model.kappa));
  const bool closed_e = model.beta == 0.0 ||
                        (model.u.is_standard() && (energy.kind() == EnergyKind::PointMassZero ||
                                                   energy.kind() == EnergyKind::TwoPoint));
  if (!closed_z || !closed_e) {
    Rng rng(derive_seed(seed, "nn_analytic.err"));
    Eigen::VectorXd w(samples);
    for (int i = 0; i < samples; ++i) {
      const double z = spacing.sample(rng);
      const double e0 = energy.sample(rng);
      const double e1 = energy.sample(rng);
      w(i) = std::exp(std::min(std::pow(z, model.alpha), model.kappa) +
                      model.beta * model.u(e0, e1));
    }
    double m, se;
    mean_and_stderr(w, &m, &se);
    est.std_error = 2.0 * mu * mu * se / (m * m);
  }
  return est;
}

DiffusionEstimate variational_diffusion_estimate(const SpacingSource& spacing,
                                                 const EnergyLaw& energy,
                                                 const RateModel& model, int n,
                                                 int env_samples, EdgeSet edges,
                                                 std::uint64_t seed, double eps_trunc) {
  model.validate();
  if (env_samples < 2)
    throw std::invalid_argument("variational estimate needs env_samples >= 2");

  DiffusionEstimate est;
  est.method = edges == EdgeSet::Full ? DiffusionMethod::VariationalFull
                                      : DiffusionMethod::VariationalNn;
  est.beta = model.beta;
  est.n_points = n;
  est.per_sample.resize(env_samples);

  parallel_for(env_samples, [&](int s) {
    const FiniteVolumeProblem p =
        sample_finite_volume(spacing, energy, model, n, eps_trunc, edges,
                             derive_seed(seed, "fv.sample", static_cast<std::uint64_t>(s)));
    est.per_sample(s) = solve_corrector(p).value;
  });
  mean_and_stderr(est.per_sample, &est.value, &est.std_error);
  return est;
}

double thinning_cutoff_schedule(double beta, double alpha, double delta) {
  if (!(beta > 0) || !(alpha > 0) || !(alpha < 1) || !(delta > 0))
    throw std::invalid_argument("schedule needs beta > 0, alpha in (0,1), delta > 0");
  return std::pow(beta, -(1.0 - alpha) / (1.0 - alpha + delta * alpha));
}

DiffusionEstimate thinning_lower_bound(const SpacingLaw& spacing, const EnergyLaw& energy,
                                       const RateModel& model, double beta, double e_star,
                                       int n, int env_samples, std::uint64_t seed,
                                       int mc_samples) {
  model.validate();
  if (!(e_star > 0 && e_star <= 1))
    throw std::invalid_argument("thinning cutoff must lie in (0,1]");

  const double nu = energy.mass_within(e_star);
  if (!(nu > 0)) throw std::invalid_argument("thinning cutoff keeps no energy mass");
  const ThinnedSpacingSampler thinned(spacing, nu);

  // D* is the beta = 0 diffusion coefficient of the thinned process; energies
  // do not enter at beta = 0.
  RateModel base = model.with_beta(0.0);
  base.kappa = std::numeric_limits<double>::infinity();
  DiffusionEstimate dstar = variational_diffusion_estimate(
      SpacingSource(thinned), EnergyLaw::point_mass_zero(), base, n, env_samples,
      EdgeSet::Full, derive_seed(seed, "thinning.dstar"));

  // c = 2 c2 from the u sandwich: on the thinned set u <= c2(|E_0|+|E_j|)
  // <= 2 c2 E_star.
  const double factor = nu * std::exp(-2.0 * model.u.c2() * beta * e_star);

  DiffusionEstimate est;
  est.method = DiffusionMethod::LowerThinning;
  est.beta = beta;
  est.n_points = n;
  est.nu_star = nu;
  est.value = factor * dstar.value;
  est.std_error = factor * dstar.std_error;
  est.per_sample = factor * dstar.per_sample;

  // Explicit nearest-neighbor floor 2 E[Z*]^2 / E[exp((Z*)^alpha)].
  Rng rng(derive_seed(seed, "thinning.floor"));
  double acc = 0.0;
  bool overflow = false;
  for (int i = 0; i < mc_samples; ++i) {
    const double w = std::exp(std::pow(thinned.sample(rng), model.alpha));
    if (!std::isfinite(w)) overflow = true;
    acc += w;
  }
  est.exp_moment_estimate = acc / mc_samples;
  const double mz = thinned.mean();
  est.nn_floor = overflow ? 0.0 : 2.0 * mz * mz / est.exp_moment_estimate;
  est.divergence_flag = overflow;
  return est;
}

namespace {

// Thinned-scan helper for the test-function bound: for a query position z,
// the anchor is y_{L_n^+} of the sequence (z, thinned points > z), i.e. the
// left end of the first gap >= c_n at or after z.
class AnchorIndex {
 public:
  AnchorIndex(const std::vector<double>& thinned, double gap) : points_(thinned) {
    const int m = static_cast<int>(points_.size());
    anchor_.assign(static_cast<std::size_t>(m), 0.0);
    double next = std::numeric_limits<double>::infinity();
    for (int i = m - 1; i >= 0; --i) {
      const double right_gap =
          (i + 1 < m) ? points_[static_cast<std::size_t>(i + 1)] - points_[static_cast<std::size_t>(i)]
                      : std::numeric_limits<double>::infinity();
      if (right_gap >= gap)
        next = points_[static_cast<std::size_t>(i)];
      anchor_[static_cast<std::size_t>(i)] = next;
    }
    gap_ = gap;
  }

  // Anchor position for a scan started at z (z itself counts as y_0).
  double anchor_from(double z) const {
    const auto it = std::upper_bound(points_.begin(), points_.end(), z);
    if (it == points_.end()) return z;  // no thinned point to the right
    if (*it - z >= gap_) return z;      // the first gap is already large
    return anchor_[static_cast<std::size_t>(it - points_.begin())];
  }

 private:
  std::vector<double> points_;
  std::vector<double> anchor_;
  double gap_ = 0.0;
};

}  // namespace

namespace detail {
double test_function_g(const Environment& env, double e_star, double gap_threshold,
                       double cap, double z) {
  std::vector<double> thinned;
  for (int k = env.min_index(); k <= env.max_index(); ++k)
    if (k == 0 || std::abs(env.energy(k)) <= e_star)
      thinned.push_back(env.position(k));
  const AnchorIndex anchors(thinned, gap_threshold);
  return std::min(anchors.anchor_from(z) - z, cap);
}
}  // namespace detail

DiffusionEstimate test_function_upper_bound(const SpacingLaw& spacing,
                                            const EnergyLaw& energy, const RateModel& model,
                                            double beta, double e_star, double n, double a,
                                            int env_samples, std::uint64_t seed) {
  model.validate();
  if (!(n >= 3)) throw std::invalid_argument("test function needs n >= 3");
  if (!(a > 0)) throw std::invalid_argument("test function needs a > 0");
  if (!(e_star > 0 && e_star <= 1))
    throw std::invalid_argument("test function cutoff must lie in (0,1]");
  if (env_samples < 2)
    throw std::invalid_argument("test function needs env_samples >= 2");

  const double alpha = model.alpha;
  const double c_n = alpha >= 1.0 ? a * std::log(n) : std::pow(a * std::log(n), 1.0 / alpha);
  const RateModel m = model.with_beta(beta);

  // Window wide enough that the summand bound e^{-|x|^alpha} (|x|+2n)^2 has
  // fallen below 1e-14 at the edge, plus room for the anchor scan.
  double reach = 1.0;
  while (std::exp(-std::pow(reach, alpha)) * std::pow(reach + 2.0 * n, 2) > 1e-14 &&
         reach < 1e7)
    reach *= 1.2;
  const double half_width = reach + n + c_n + 10.0 * spacing.mean();

  DiffusionEstimate est;
  est.method = DiffusionMethod::UpperTestFunction;
  est.beta = beta;
  est.per_sample.resize(env_samples);
  Eigen::VectorXd interior_ok = Eigen::VectorXd::Zero(env_samples);

  parallel_for(env_samples, [&](int s) {
    const Environment env(spacing, energy, half_width,
                          derive_seed(seed, "tf.env", static_cast<std::uint64_t>(s)),
                          alpha, 1e-12);

    std::vector<double> thinned;
    for (int k = env.min_index(); k <= env.max_index(); ++k)
      if (k == 0 || std::abs(env.energy(k)) <= e_star)
        thinned.push_back(env.position(k));
    const AnchorIndex anchors(thinned, c_n);

    auto g_at = [&](double z) { return std::min(anchors.anchor_from(z) - z, n); };
    const double g0 = g_at(0.0);
    const double e0 = env.energy(0);

    double sum = 0.0;
    for (int k = env.min_index(); k <= env.max_index(); ++k) {
      if (k == 0) continue;
      const double x = env.position(k);
      if (std::abs(x) > reach) continue;
      const double w = std::exp(-std::pow(std::abs(x), alpha) -
                                beta * m.u(e0, env.energy(k)));
      const double grad = g_at(x) - g0;
      sum += w * (x + grad) * (x + grad);
    }
    est.per_sample(s) = sum;

    // A0 diagnostic: when the anchors on both sides sit inside [-n/2, n/2],
    // every thinned point between them must cancel exactly.
    const double right_anchor = anchors.anchor_from(0.0);
    double left_anchor = -std::numeric_limits<double>::infinity();
    for (std::size_t i = thinned.size(); i-- > 1;) {
      if (thinned[i] - thinned[i - 1] >= c_n && thinned[i] <= 0.0) {
        left_anchor = thinned[i];
        break;
      }
    }
    bool ok = true;
    if (std::abs(right_anchor) <= n / 2 && std::isfinite(left_anchor) &&
        std::abs(left_anchor) <= n / 2) {
      for (double y : thinned) {
        if (y <= left_anchor || y > right_anchor || y == 0.0) continue;
        if (std::abs(y + g_at(y) - g0) > 1e-9) ok = false;
      }
      interior_ok(s) = ok ? 1.0 : 0.0;
    } else {
      interior_ok(s) = 1.0;  // event vacuous on this sample
    }
  });

  mean_and_stderr(est.per_sample, &est.value, &est.std_error);
  est.interior_vanished_fraction = interior_ok.mean();
  return est;
}

CertificateResult subdiffusivity_certificate(const SpacingLaw& spacing, double alpha,
                                             int order, int samples, std::uint64_t seed,
                                             double growth_threshold) {
  if (order < 1) throw std::invalid_argument("certificate needs order >= 1");
  if (samples < 8) throw std::invalid_argument("certificate needs samples >= 8");
  if (!(alpha > 0)) throw std::invalid_argument("certificate needs alpha > 0");

  const int ext = 2 * order;  // extension band used for the declared remainder
  CertificateResult out;
  out.c1_samples.resize(samples);
  Eigen::VectorXd inv(samples), remainder_share(samples);

  parallel_for(samples, [&](int s) {
    Rng rng(derive_seed(seed, "certificate", static_cast<std::uint64_t>(s)));
    const double z0 = spacing.sample(rng);
    std::vector<double> right(static_cast<std::size_t>(ext) + 1, 0.0);
    std::vector<double> left(static_cast<std::size_t>(ext) + 1, 0.0);
    for (int i = 1; i <= ext; ++i)
      right[static_cast<std::size_t>(i)] =
          right[static_cast<std::size_t>(i - 1)] + spacing.sample(rng);
    for (int i = 1; i <= ext; ++i)
      left[static_cast<std::size_t>(i)] =
          left[static_cast<std::size_t>(i - 1)] + spacing.sample(rng);

    double main = 0.0, band = 0.0;
    for (int nn = 0; nn <= ext; ++nn) {
      for (int mm = 0; mm <= ext; ++mm) {
        const double arg = z0 + right[static_cast<std::size_t>(nn)] +
                           left[static_cast<std::size_t>(mm)];
        const double term = (1.0 + nn + mm) * std::exp(-std::pow(arg, alpha));
        if (nn <= order && mm <= order)
          main += term;
        else
          band += term;
      }
    }
    out.c1_samples(s) = main;
    inv(s) = 1.0 / main;
    remainder_share(s) = band / main;
  });
  out.mean_remainder_share = remainder_share.mean();

  const int levels = 4;
  const int base = samples / 8;
  out.sample_counts.resize(levels);
  out.running_means.resize(levels);
  for (int l = 0; l < levels; ++l) {
    const int count = std::min(base << l, samples);
    out.sample_counts(l) = count;
    out.running_means(l) = inv.head(count).mean();
  }
  out.doubling_ratios.resize(levels - 1);
  for (int l = 0; l + 1 < levels; ++l) {
    out.doubling_ratios(l) = out.running_means(l + 1) / out.running_means(l);
    if (out.doubling_ratios(l) >= growth_threshold) out.divergent = true;
  }
  return out;
}

}  // namespace hoplab
