#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "hoplab/rng.hpp"

namespace hoplab {

// Law of the i.i.d. spacings Z_j between consecutive points.
enum class SpacingKind { Deterministic, Exponential, Geometric, Weibull, HalfGaussian, Pareto };

class SpacingLaw {
 public:
  static SpacingLaw deterministic(double a);
  static SpacingLaw exponential(double rate);
  static SpacingLaw geometric(double p);            // support {1,2,...}, P(Z=k)=p(1-p)^{k-1}
  static SpacingLaw weibull(double rate, double shape);  // P(Z>t)=exp(-rate*t^shape)
  static SpacingLaw half_gaussian(double sigma);    // |N(0,sigma^2)|
  static SpacingLaw pareto(double r);               // P(Z>t)=t^-r, t>=1; needs r>2

  SpacingKind kind() const { return kind_; }
  double param1() const { return p1_; }
  double param2() const { return p2_; }

  double mean() const;
  double survival(double t) const;  // psi(t) = P(Z > t), t >= 0
  double sample(Rng& rng) const;
  bool unbounded() const { return kind_ != SpacingKind::Deterministic; }
  std::string name() const;

 private:
  SpacingLaw(SpacingKind k, double p1, double p2) : kind_(k), p1_(p1), p2_(p2) {}
  SpacingKind kind_;
  double p1_;
  double p2_;
};

// Law of the energy marks E_k in [-1,1].
enum class EnergyKind { PowerLaw, TwoPoint, PointMassZero };

class EnergyLaw {
 public:
  static EnergyLaw power_law(double delta);   // nu[-E,E] = E^delta on [0,1]
  static EnergyLaw two_point(double eps);     // mass 1/2 at +-eps
  static EnergyLaw point_mass_zero();

  EnergyKind kind() const { return kind_; }
  double param() const { return p_; }

  double sample(Rng& rng) const;
  double mass_within(double e) const;  // nu[-e, e]
  std::string name() const;

 private:
  EnergyLaw(EnergyKind k, double p) : kind_(k), p_(p) {}
  EnergyKind kind_;
  double p_;
};

// Finite window of the marked point process, origin conditioned to be a
// point (x_0 = 0). Positions and marks are generated from chunked streams
// keyed by (seed, side, chunk), so rebuilding with the same (laws, seed,
// window) is bit-identical and extending a window replays the same draws.
class Environment {
 public:
  Environment(SpacingLaw spacing, EnergyLaw energy, double half_width,
              std::uint64_t seed, double window_alpha = 1.0,
              double eps_trunc = 1e-12);

  static Environment from_points(std::vector<double> positions,
                                 std::vector<double> energies,
                                 SpacingLaw spacing, EnergyLaw energy,
                                 std::uint64_t seed, double half_width);

  int min_index() const { return -static_cast<int>(left_pos_.size()); }
  int max_index() const { return static_cast<int>(right_pos_.size()); }
  int point_count() const {
    return static_cast<int>(left_pos_.size() + right_pos_.size()) + 1;
  }

  double position(int k) const;
  double energy(int k) const;

  double covered_left() const {
    return left_pos_.empty() ? 0.0 : left_pos_.back();
  }
  double covered_right() const {
    return right_pos_.empty() ? 0.0 : right_pos_.back();
  }

  // Grows coverage to at least [left_target, right_target]; returns a new
  // environment whose points extend this one's exactly.
  Environment extended(double left_target, double right_target) const;

  const SpacingLaw& spacing_law() const { return spacing_; }
  const EnergyLaw& energy_law() const { return energy_; }
  std::uint64_t seed() const { return seed_; }
  double half_width() const { return half_width_; }
  bool generated() const { return generated_; }

  Eigen::VectorXd positions() const;  // ascending, includes the origin
  Eigen::VectorXd energies() const;   // aligned with positions()

 private:
  Environment(SpacingLaw s, EnergyLaw e, std::uint64_t seed, double hw)
      : spacing_(s), energy_(e), seed_(seed), half_width_(hw) {}
  void grow_side(bool right, double target);
  void check_invariants() const;

  SpacingLaw spacing_;
  EnergyLaw energy_;
  std::uint64_t seed_;
  double half_width_;
  bool generated_ = true;  // false for from_points/thinned environments

  // right_pos_[i] = x_{i+1}, left_pos_[i] = x_{-(i+1)}
  std::vector<double> right_pos_, left_pos_;
  std::vector<double> right_en_, left_en_;
  double origin_en_ = 0.0;
  int right_chunks_ = 0, left_chunks_ = 0;
};

// Thinned spacing Z* = sum_{j=1..Q} Z_j, Q geometric(nu_star) on {1,2,...}.
class ThinnedSpacingSampler {
 public:
  ThinnedSpacingSampler(SpacingLaw base, double nu_star);

  const SpacingLaw& base() const { return base_; }
  double nu_star() const { return nu_; }
  double mean() const { return base_.mean() / nu_; }  // Wald
  double lambda_star() const;  // -(1/mu) log(1-nu)
  double sample(Rng& rng) const;

 private:
  SpacingLaw base_;
  double nu_;
};

Eigen::VectorXd sample_spacings(const SpacingLaw& law, int n, std::uint64_t seed);

Environment build_environment(const SpacingLaw& spacing, const EnergyLaw& energy,
                              double half_width, std::uint64_t seed,
                              double window_alpha = 1.0, double eps_trunc = 1e-12);

// Keeps the origin plus all points with |E| <= cutoff, positions unchanged,
// re-indexed so the origin is index 0. Throws if either side empties.
Environment thin_environment(const Environment& env, double cutoff);

Eigen::VectorXd sample_thinned_spacing(const ThinnedSpacingSampler& sampler, int n,
                                       std::uint64_t seed);

double tail_psi(const SpacingLaw& law, double t);

struct ThinnedTailBounds {
  double empirical;    // fraction of draws >= t
  double lower;        // c * exp(-lambda_star * t)
  double upper;        // 4 * exp(-nu_star/(4 mu) * t)
};

// Implementation constant for the lower bound prefactor.
inline constexpr double kThinnedTailLowerC = 0.25;

ThinnedTailBounds thinned_tail_bounds(const ThinnedSpacingSampler& sampler, double t,
                                      int samples, std::uint64_t seed);

}  // namespace hoplab
