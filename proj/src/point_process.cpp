#include "hoplab/point_process.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace hoplab {

namespace {
constexpr int kChunk = 256;

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}
}  // namespace

SpacingLaw SpacingLaw::deterministic(double a) {
  require(a > 0, "deterministic spacing needs a > 0");
  return {SpacingKind::Deterministic, a, 0.0};
}

SpacingLaw SpacingLaw::exponential(double rate) {
  require(rate > 0, "exponential spacing needs rate > 0");
  return {SpacingKind::Exponential, rate, 0.0};
}

SpacingLaw SpacingLaw::geometric(double p) {
  require(p > 0 && p < 1, "geometric spacing needs p in (0,1)");
  return {SpacingKind::Geometric, p, 0.0};
}

SpacingLaw SpacingLaw::weibull(double rate, double shape) {
  require(rate > 0 && shape > 0, "weibull spacing needs rate, shape > 0");
  return {SpacingKind::Weibull, rate, shape};
}

SpacingLaw SpacingLaw::half_gaussian(double sigma) {
  require(sigma > 0, "half-gaussian spacing needs sigma > 0");
  return {SpacingKind::HalfGaussian, sigma, 0.0};
}

SpacingLaw SpacingLaw::pareto(double r) {
  require(r > 2, "pareto spacing needs r > 2 so that E[Z^2] < inf");
  return {SpacingKind::Pareto, r, 0.0};
}

double SpacingLaw::mean() const {
  switch (kind_) {
    case SpacingKind::Deterministic:
      return p1_;
    case SpacingKind::Exponential:
      return 1.0 / p1_;
    case SpacingKind::Geometric:
      return 1.0 / p1_;
    case SpacingKind::Weibull:
      return std::pow(p1_, -1.0 / p2_) * std::tgamma(1.0 + 1.0 / p2_);
    case SpacingKind::HalfGaussian:
      return p1_ * std::sqrt(2.0 / std::numbers::pi);
    case SpacingKind::Pareto:
      return p1_ / (p1_ - 1.0);
  }
  return 0.0;
}

double SpacingLaw::survival(double t) const {
  if (t < 0) throw std::invalid_argument("survival needs t >= 0");
  switch (kind_) {
    case SpacingKind::Deterministic:
      return t < p1_ ? 1.0 : 0.0;
    case SpacingKind::Exponential:
      return std::exp(-p1_ * t);
    case SpacingKind::Geometric:
      return std::pow(1.0 - p1_, std::floor(t));
    case SpacingKind::Weibull:
      return std::exp(-p1_ * std::pow(t, p2_));
    case SpacingKind::HalfGaussian:
      return std::erfc(t / (p1_ * std::numbers::sqrt2));
    case SpacingKind::Pareto:
      return t < 1.0 ? 1.0 : std::pow(t, -p1_);
  }
  return 0.0;
}

double SpacingLaw::sample(Rng& rng) const {
  switch (kind_) {
    case SpacingKind::Deterministic:
      return p1_;
    case SpacingKind::Exponential:
      return -std::log(rng.uniform()) / p1_;
    case SpacingKind::Geometric:
      return 1.0 + std::floor(std::log(rng.uniform()) / std::log1p(-p1_));
    case SpacingKind::Weibull:
      return std::pow(-std::log(rng.uniform()) / p1_, 1.0 / p2_);
    case SpacingKind::HalfGaussian:
      return p1_ * std::abs(rng.normal());
    case SpacingKind::Pareto:
      return std::pow(rng.uniform(), -1.0 / p1_);
  }
  return 0.0;
}

std::string SpacingLaw::name() const {
  switch (kind_) {
    case SpacingKind::Deterministic:
      return "deterministic(" + std::to_string(p1_) + ")";
    case SpacingKind::Exponential:
      return "exponential(" + std::to_string(p1_) + ")";
    case SpacingKind::Geometric:
      return "geometric(" + std::to_string(p1_) + ")";
    case SpacingKind::Weibull:
      return "weibull(" + std::to_string(p1_) + "," + std::to_string(p2_) + ")";
    case SpacingKind::HalfGaussian:
      return "half_gaussian(" + std::to_string(p1_) + ")";
    case SpacingKind::Pareto:
      return "pareto(" + std::to_string(p1_) + ")";
  }
  return "?";
}

EnergyLaw EnergyLaw::power_law(double delta) {
  require(delta > 0, "power-law energy needs delta > 0");
  return {EnergyKind::PowerLaw, delta};
}

EnergyLaw EnergyLaw::two_point(double eps) {
  require(eps > 0 && eps <= 1, "two-point energy needs eps in (0,1]");
  return {EnergyKind::TwoPoint, eps};
}

EnergyLaw EnergyLaw::point_mass_zero() { return {EnergyKind::PointMassZero, 0.0}; }

double EnergyLaw::sample(Rng& rng) const {
  switch (kind_) {
    case EnergyKind::PowerLaw: {
      // |E| = U^{1/delta} gives nu[-E,E] = E^delta exactly.
      const double mag = std::pow(rng.uniform(), 1.0 / p_);
      return rng.coin() ? mag : -mag;
    }
    case EnergyKind::TwoPoint:
      return rng.coin() ? p_ : -p_;
    case EnergyKind::PointMassZero:
      rng.bits();  // keep the draw count per mark fixed across laws
      return 0.0;
  }
  return 0.0;
}

double EnergyLaw::mass_within(double e) const {
  if (e < 0) throw std::invalid_argument("mass_within needs e >= 0");
  switch (kind_) {
    case EnergyKind::PowerLaw:
      return std::pow(std::min(e, 1.0), p_);
    case EnergyKind::TwoPoint:
      return e >= p_ ? 1.0 : 0.0;
    case EnergyKind::PointMassZero:
      return 1.0;
  }
  return 0.0;
}

std::string EnergyLaw::name() const {
  switch (kind_) {
    case EnergyKind::PowerLaw:
      return "power_law(" + std::to_string(p_) + ")";
    case EnergyKind::TwoPoint:
      return "two_point(" + std::to_string(p_) + ")";
    case EnergyKind::PointMassZero:
      return "point_mass_zero";
  }
  return "?";
}

Environment::Environment(SpacingLaw spacing, EnergyLaw energy, double half_width,
                         std::uint64_t seed, double window_alpha, double eps_trunc)
    : spacing_(spacing), energy_(energy), seed_(seed), half_width_(half_width) {
  require(half_width > 0, "environment needs half_width > 0");
  require(window_alpha > 0, "environment needs window_alpha > 0");
  require(eps_trunc > 0 && eps_trunc < 1, "environment needs eps_trunc in (0,1)");

  // Rates decay like exp(-|x|^alpha); this margin keeps the rate mass past
  // the window edge below eps_trunc for sites inside [-hw, hw].
  const double margin =
      std::pow(std::log(1.0 / eps_trunc), 1.0 / window_alpha) + 5.0 * spacing.mean();

  Rng origin_rng(derive_seed(seed_, "energy.origin"));
  origin_en_ = energy_.sample(origin_rng);

  grow_side(true, half_width + margin);
  grow_side(false, -(half_width + margin));
  check_invariants();
}

void Environment::grow_side(bool right, double target) {
  auto& pos = right ? right_pos_ : left_pos_;
  auto& en = right ? right_en_ : left_en_;
  auto& chunks = right ? right_chunks_ : left_chunks_;
  const char* spacing_label = right ? "spacing.right" : "spacing.left";
  const char* energy_label = right ? "energy.right" : "energy.left";

  auto covered = [&]() { return pos.empty() ? 0.0 : pos.back(); };
  while (right ? covered() < target : covered() > target) {
    Rng zrng(derive_seed(seed_, spacing_label, static_cast<std::uint64_t>(chunks)));
    Rng erng(derive_seed(seed_, energy_label, static_cast<std::uint64_t>(chunks)));
    for (int i = 0; i < kChunk; ++i) {
      const double z = spacing_.sample(zrng);
      pos.push_back(covered() + (right ? z : -z));
      en.push_back(energy_.sample(erng));
    }
    ++chunks;
  }
}

Environment Environment::extended(double left_target, double right_target) const {
  if (!generated_)
    throw std::logic_error("cannot extend an environment built from explicit points");
  Environment out = *this;
  out.grow_side(true, right_target);
  out.grow_side(false, left_target);
  return out;
}

Environment Environment::from_points(std::vector<double> positions,
                                     std::vector<double> energies,
                                     SpacingLaw spacing, EnergyLaw energy,
                                     std::uint64_t seed, double half_width) {
  if (positions.size() != energies.size())
    throw std::invalid_argument("positions/energies size mismatch");
  Environment env(spacing, energy, seed, half_width);
  env.generated_ = false;
  const auto origin = std::find(positions.begin(), positions.end(), 0.0);
  if (origin == positions.end())
    throw std::invalid_argument("explicit point set must contain the origin");
  const auto oi = static_cast<std::size_t>(origin - positions.begin());
  env.origin_en_ = energies[oi];
  for (std::size_t i = oi + 1; i < positions.size(); ++i) {
    env.right_pos_.push_back(positions[i]);
    env.right_en_.push_back(energies[i]);
  }
  for (std::size_t i = oi; i-- > 0;) {
    env.left_pos_.push_back(positions[i]);
    env.left_en_.push_back(energies[i]);
  }
  env.check_invariants();
  return env;
}

void Environment::check_invariants() const {
  double prev = 0.0;
  for (double x : right_pos_) {
    if (!(x > prev)) throw std::logic_error("positions must strictly increase");
    prev = x;
  }
  prev = 0.0;
  for (double x : left_pos_) {
    if (!(x < prev)) throw std::logic_error("positions must strictly decrease to the left");
    prev = x;
  }
}

double Environment::position(int k) const {
  if (k == 0) return 0.0;
  if (k > 0) {
    if (k > max_index()) throw std::out_of_range("environment index out of range");
    return right_pos_[static_cast<std::size_t>(k - 1)];
  }
  if (k < min_index()) throw std::out_of_range("environment index out of range");
  return left_pos_[static_cast<std::size_t>(-k - 1)];
}

double Environment::energy(int k) const {
  if (k == 0) return origin_en_;
  if (k > 0) {
    if (k > max_index()) throw std::out_of_range("environment index out of range");
    return right_en_[static_cast<std::size_t>(k - 1)];
  }
  if (k < min_index()) throw std::out_of_range("environment index out of range");
  return left_en_[static_cast<std::size_t>(-k - 1)];
}

Eigen::VectorXd Environment::positions() const {
  Eigen::VectorXd out(point_count());
  int i = 0;
  for (int k = min_index(); k <= max_index(); ++k) out(i++) = position(k);
  return out;
}

Eigen::VectorXd Environment::energies() const {
  Eigen::VectorXd out(point_count());
  int i = 0;
  for (int k = min_index(); k <= max_index(); ++k) out(i++) = energy(k);
  return out;
}

ThinnedSpacingSampler::ThinnedSpacingSampler(SpacingLaw base, double nu_star)
    : base_(base), nu_(nu_star) {
  require(nu_star > 0 && nu_star <= 1, "thinning probability must lie in (0,1]");
}

double ThinnedSpacingSampler::lambda_star() const {
  return -std::log1p(-nu_) / base_.mean();
}

double ThinnedSpacingSampler::sample(Rng& rng) const {
  long q = 1;
  if (nu_ < 1.0)
    q = 1 + static_cast<long>(std::floor(std::log(rng.uniform()) / std::log1p(-nu_)));
  double sum = 0.0;
  for (long j = 0; j < q; ++j) sum += base_.sample(rng);
  return sum;
}

Eigen::VectorXd sample_spacings(const SpacingLaw& law, int n, std::uint64_t seed) {
  require(n >= 1, "sample_spacings needs n >= 1");
  Rng rng(derive_seed(seed, "spacings"));
  Eigen::VectorXd out(n);
  for (int i = 0; i < n; ++i) out(i) = law.sample(rng);
  return out;
}

Environment build_environment(const SpacingLaw& spacing, const EnergyLaw& energy,
                              double half_width, std::uint64_t seed,
                              double window_alpha, double eps_trunc) {
  return Environment(spacing, energy, half_width, seed, window_alpha, eps_trunc);
}

Environment thin_environment(const Environment& env, double cutoff) {
  if (!(cutoff > 0 && cutoff <= 1))
    throw std::invalid_argument("thinning cutoff must lie in (0,1]");
  std::vector<double> pos, en;
  bool left_hit = false, right_hit = false;
  for (int k = env.min_index(); k <= env.max_index(); ++k) {
    if (k != 0 && std::abs(env.energy(k)) > cutoff) continue;
    pos.push_back(env.position(k));
    en.push_back(env.energy(k));
    left_hit |= k < 0;
    right_hit |= k > 0;
  }
  if ((env.min_index() < 0 && !left_hit) || (env.max_index() > 0 && !right_hit))
    throw std::runtime_error("thinning left no point on one side of the origin");
  return Environment::from_points(std::move(pos), std::move(en), env.spacing_law(),
                                  env.energy_law(), env.seed(), env.half_width());
}

Eigen::VectorXd sample_thinned_spacing(const ThinnedSpacingSampler& sampler, int n,
                                       std::uint64_t seed) {
  require(n >= 1, "sample_thinned_spacing needs n >= 1");
  Rng rng(derive_seed(seed, "thinned"));
  Eigen::VectorXd out(n);
  for (int i = 0; i < n; ++i) out(i) = sampler.sample(rng);
  return out;
}

double tail_psi(const SpacingLaw& law, double t) { return law.survival(t); }

ThinnedTailBounds thinned_tail_bounds(const ThinnedSpacingSampler& sampler, double t,
                                      int samples, std::uint64_t seed) {
  require(t >= 0, "thinned_tail_bounds needs t >= 0");
  require(samples >= 1, "thinned_tail_bounds needs samples >= 1");
  Rng rng(derive_seed(seed, "thinned_tail"));
  long hits = 0;
  for (int i = 0; i < samples; ++i)
    if (sampler.sample(rng) >= t) ++hits;
  const double mu = sampler.base().mean();
  ThinnedTailBounds out;
  out.empirical = static_cast<double>(hits) / samples;
  out.lower = kThinnedTailLowerC * std::exp(-sampler.lambda_star() * t);
  // Chernoff constant delta = nu/(4 mu) from the geometric-compound bound.
  out.upper = 4.0 * std::exp(-sampler.nu_star() / (4.0 * mu) * t);
  return out;
}

}  // namespace hoplab
