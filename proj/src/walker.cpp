#include "hoplab/walker.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "hoplab/parallel.hpp"

namespace hoplab {

namespace {

class WalkEngine {
 public:
  WalkEngine(Environment env, const RateModel& model, double eps_trunc,
             std::uint64_t seed, int hop_range)
      : env_(std::move(env)),
        model_(model),
        eps_trunc_(eps_trunc),
        rng_(derive_seed(seed, "walk")),
        hop_range_(hop_range) {
    model_.validate();
    reach_ = hop_range_ == 1 ? 0.0 : current_radius();
  }

  Trajectory run(double horizon, bool record) {
    if (!(horizon > 0)) throw std::invalid_argument("walk horizon must be positive");
    Trajectory traj;
    traj.horizon = horizon;
    traj.points.push_back({0.0, 0, 0.0});
    double t = 0.0;
    int site = 0;
    while (true) {
      const CachedSite& dist = site_distribution(site);
      t += -std::log(rng_.uniform()) / dist.total_rate;
      if (t > horizon) break;
      const double u = rng_.uniform();
      const int next = dist.targets[pick(dist.cumulative, u)];
      site = next;
      const TrajectoryPoint p{t, site, env_.position(site)};
      if (record)
        traj.points.push_back(p);
      else
        traj.points.back() = p;  // keep only the latest state
    }
    return traj;
  }

 private:
  struct CachedSite {
    double total_rate = 0.0;
    std::vector<int> targets;
    std::vector<double> cumulative;
  };

  static std::size_t pick(const std::vector<double>& cumulative, double u) {
    const auto it = std::lower_bound(cumulative.begin(), cumulative.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()),
                                 cumulative.size() - 1);
  }

  double current_radius() const {
    const double s = unit_interval_count_bound(env_);
    double r = std::pow(std::log(std::max(s, 1.0) * 8.0 / eps_trunc_), 1.0 / model_.alpha);
    double tail = rate_tail_majorant(r, model_.alpha, s);
    for (int i = 0; i < 200 && tail > eps_trunc_; ++i) {
      r *= 1.25;
      tail = rate_tail_majorant(r, model_.alpha, s);
    }
    if (tail > eps_trunc_) throw TruncationError("cannot certify rate tail for walk");
    return r;
  }

  void ensure_coverage(int site) {
    const double x = env_.position(site);
    const double pad = std::max(10.0 * env_.spacing_law().mean(), reach_);
    bool grew = false;
    if (x + reach_ > env_.covered_right() - 1e-9 || site + 1 > env_.max_index() - 1) {
      env_ = env_.extended(env_.covered_left(), x + reach_ + pad);
      grew = true;
    }
    if (x - reach_ < env_.covered_left() + 1e-9 || site - 1 < env_.min_index() + 1) {
      env_ = env_.extended(x - reach_ - pad, env_.covered_right());
      grew = true;
    }
    if (grew && hop_range_ != 1) reach_ = std::max(reach_, current_radius());
  }

  const CachedSite& site_distribution(int site) {
    auto it = cache_.find(site);
    if (it != cache_.end()) return it->second;
    ensure_coverage(site);

    CachedSite c;
    if (hop_range_ == 1) {
      const double x0 = env_.position(site), e0 = env_.energy(site);
      for (int k : {site - 1, site + 1}) {
        const double r = nn_rate(model_, x0, e0, env_.position(k), env_.energy(k));
        c.targets.push_back(k);
        c.total_rate += r;
        c.cumulative.push_back(c.total_rate);
      }
    } else {
      JumpDistribution d = total_rate_and_jump_dist(model_, env_, site, eps_trunc_);
      c.total_rate = d.total_rate;
      c.targets = std::move(d.targets);
      double acc = 0.0;
      c.cumulative.reserve(c.targets.size());
      for (long i = 0; i < d.probabilities.size(); ++i) {
        acc += d.probabilities(i);
        c.cumulative.push_back(acc);
      }
    }
    for (double& v : c.cumulative) v /= c.cumulative.back();
    return cache_.emplace(site, std::move(c)).first->second;
  }

  Environment env_;
  RateModel model_;
  double eps_trunc_;
  Rng rng_;
  int hop_range_;
  double reach_;
  std::unordered_map<int, CachedSite> cache_;
};

}  // namespace

namespace detail {
Trajectory simulate(const Environment& env, const RateModel& model, double horizon,
                    double eps_trunc, std::uint64_t seed, int hop_range, bool record) {
  WalkEngine engine(env, model, eps_trunc, seed, hop_range);
  return engine.run(horizon, record);
}
}  // namespace detail

Trajectory simulate_vrh(const Environment& env, const RateModel& model, double horizon,
                        double eps_trunc, std::uint64_t seed) {
  return detail::simulate(env, model, horizon, eps_trunc, seed, 0, true);
}

Trajectory simulate_nn(const Environment& env, const RateModel& model, double horizon,
                       std::uint64_t seed) {
  return detail::simulate(env, model, horizon, 1e-9, seed, 1, true);
}

MsdEstimate msd_diffusion_estimate(const SpacingLaw& spacing, const EnergyLaw& energy,
                                   const RateModel& model, WalkKind kind, double horizon,
                                   int replicas, std::uint64_t seed) {
  if (replicas < 2) throw std::invalid_argument("msd estimate needs replicas >= 2");
  if (!(horizon > 0)) throw std::invalid_argument("msd estimate needs horizon > 0");

  const double eps_trunc = 1e-9;
  MsdEstimate est;
  est.replicas = replicas;
  est.horizon = horizon;
  est.terminal_displacements.resize(replicas);

  parallel_for(replicas, [&](int r) {
    const std::uint64_t env_seed = derive_seed(seed, "msd.env", static_cast<std::uint64_t>(r));
    const std::uint64_t walk_seed = derive_seed(seed, "msd.walk", static_cast<std::uint64_t>(r));
    Environment env(spacing, energy, 20.0 * spacing.mean(), env_seed, model.alpha, 1e-12);
    const int hop = kind == WalkKind::Nn ? 1 : 0;
    const Trajectory t = detail::simulate(env, model, horizon, eps_trunc, walk_seed, hop, false);
    est.terminal_displacements(r) = t.points.back().position;
  });

  const Eigen::ArrayXd v = est.terminal_displacements.array().square() / horizon;
  est.diffusion = v.mean();
  est.std_error = std::sqrt((v - v.mean()).square().sum() / (replicas - 1.0) / replicas);
  return est;
}

}  // namespace hoplab
