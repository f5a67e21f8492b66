#include "hoplab/serialize.hpp"

#include <cstdio>

namespace hoplab {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

json to_json(const SpacingLaw& law) {
  switch (law.kind()) {
    case SpacingKind::Deterministic:
      return {{"kind", "deterministic"}, {"a", law.param1()}};
    case SpacingKind::Exponential:
      return {{"kind", "exponential"}, {"rate", law.param1()}};
    case SpacingKind::Geometric:
      return {{"kind", "geometric"}, {"p", law.param1()}};
    case SpacingKind::Weibull:
      return {{"kind", "weibull"}, {"rate", law.param1()}, {"shape", law.param2()}};
    case SpacingKind::HalfGaussian:
      return {{"kind", "half_gaussian"}, {"sigma", law.param1()}};
    case SpacingKind::Pareto:
      return {{"kind", "pareto"}, {"r", law.param1()}};
  }
  return {};
}

SpacingLaw spacing_law_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "deterministic") return SpacingLaw::deterministic(j.at("a").get<double>());
  if (kind == "exponential") return SpacingLaw::exponential(j.at("rate").get<double>());
  if (kind == "geometric") return SpacingLaw::geometric(j.at("p").get<double>());
  if (kind == "weibull")
    return SpacingLaw::weibull(j.at("rate").get<double>(), j.at("shape").get<double>());
  if (kind == "half_gaussian") return SpacingLaw::half_gaussian(j.at("sigma").get<double>());
  if (kind == "pareto") return SpacingLaw::pareto(j.at("r").get<double>());
  throw std::invalid_argument("unknown spacing law kind: " + kind);
}

json to_json(const EnergyLaw& law) {
  switch (law.kind()) {
    case EnergyKind::PowerLaw:
      return {{"kind", "power_law"}, {"delta", law.param()}};
    case EnergyKind::TwoPoint:
      return {{"kind", "two_point"}, {"eps", law.param()}};
    case EnergyKind::PointMassZero:
      return {{"kind", "point_mass_zero"}};
  }
  return {};
}

EnergyLaw energy_law_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "power_law") return EnergyLaw::power_law(j.at("delta").get<double>());
  if (kind == "two_point") return EnergyLaw::two_point(j.at("eps").get<double>());
  if (kind == "point_mass_zero") return EnergyLaw::point_mass_zero();
  throw std::invalid_argument("unknown energy law kind: " + kind);
}

json to_json(const RateModel& model) {
  json j{{"alpha", model.alpha}, {"beta", model.beta}};
  j["u"] = model.u.is_standard() ? "standard" : "custom";
  if (std::isfinite(model.kappa))
    j["kappa"] = model.kappa;
  else
    j["kappa"] = "inf";
  return j;
}

RateModel rate_model_from_json(const json& j) {
  RateModel m;
  m.alpha = j.at("alpha").get<double>();
  m.beta = j.value("beta", 0.0);
  if (j.contains("u") && j.at("u").get<std::string>() != "standard")
    throw std::invalid_argument("custom u functions cannot be loaded from JSON");
  if (j.contains("kappa")) {
    if (j.at("kappa").is_string()) {
      if (j.at("kappa").get<std::string>() != "inf")
        throw std::invalid_argument("kappa must be a number or \"inf\"");
      m.kappa = std::numeric_limits<double>::infinity();
    } else {
      m.kappa = j.at("kappa").get<double>();
    }
  }
  m.validate();
  return m;
}

json to_json(const Environment& env) {
  json points = json::array();
  for (int k = env.min_index(); k <= env.max_index(); ++k)
    points.push_back({{"index", k}, {"x", env.position(k)}, {"E", env.energy(k)}});
  return {{"spacing_law", to_json(env.spacing_law())},
          {"energy_law", to_json(env.energy_law())},
          {"seed", env.seed()},
          {"half_width", env.half_width()},
          {"points", std::move(points)}};
}

json to_json(const MsdEstimate& est) {
  return {{"diffusion", est.diffusion},
          {"std_error", est.std_error},
          {"replicas", est.replicas},
          {"horizon", est.horizon}};
}

json to_json(const DiffusionEstimate& est) {
  json j{{"method", method_name(est.method)},
         {"value", est.value},
         {"std_error", est.std_error},
         {"beta", est.beta},
         {"n_points", est.n_points},
         {"samples", static_cast<int>(est.per_sample.size())},
         {"divergence_flag", est.divergence_flag}};
  if (est.method == DiffusionMethod::LowerThinning) {
    j["nu_star"] = est.nu_star;
    j["nn_floor"] = est.nn_floor;
    j["exp_moment_estimate"] = est.exp_moment_estimate;
  }
  if (est.method == DiffusionMethod::UpperTestFunction)
    j["interior_vanished_fraction"] = est.interior_vanished_fraction;
  return j;
}

std::string trajectory_csv(const Trajectory& traj) {
  std::string out = "time,index,position\n";
  for (const auto& p : traj.points) {
    out += format_double(p.time);
    out += ',';
    out += std::to_string(p.index);
    out += ',';
    out += format_double(p.position);
    out += '\n';
  }
  return out;
}

}  // namespace hoplab
