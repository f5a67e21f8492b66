#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "hoplab/rates.hpp"

namespace hoplab {

struct TrajectoryPoint {
  double time;
  long index;
  double position;
};

struct Trajectory {
  std::vector<TrajectoryPoint> points;  // starts at (0, 0, 0)
  double horizon = 0.0;
};

enum class WalkKind { Vrh, Nn };

// Continuous-time variable-range walk: exponential holding time with the
// site's (truncated) total rate, jump target from c/lambda. The environment
// is grown lazily whenever the walker nears the covered boundary.
Trajectory simulate_vrh(const Environment& env, const RateModel& model, double horizon,
                        double eps_trunc, std::uint64_t seed);

// Nearest-neighbor walk with kappa-truncated rates; holding parameter
// gamma = r(i,i+1) + r(i,i-1) in (0, 2].
Trajectory simulate_nn(const Environment& env, const RateModel& model, double horizon,
                       std::uint64_t seed);

namespace detail {
// Shared engine: hop_range = 1 restricts targets to adjacent indices and uses
// the kappa-truncated rates; hop_range <= 0 means unrestricted (full model).
Trajectory simulate(const Environment& env, const RateModel& model, double horizon,
                    double eps_trunc, std::uint64_t seed, int hop_range, bool record);
}  // namespace detail

struct MsdEstimate {
  double diffusion = 0.0;   // mean over replicas of X(T)^2 / T
  double std_error = 0.0;   // replica-to-replica standard error
  int replicas = 0;
  double horizon = 0.0;
  Eigen::VectorXd terminal_displacements;
};

// Each replica runs on an independently sampled environment (origin
// conditioned to be a point) with its own derived seeds.
MsdEstimate msd_diffusion_estimate(const SpacingLaw& spacing, const EnergyLaw& energy,
                                   const RateModel& model, WalkKind kind, double horizon,
                                   int replicas, std::uint64_t seed);

}  // namespace hoplab
