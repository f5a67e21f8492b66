#pragma once

#include <string>

#include "json.hpp"

#include "hoplab/diffusion.hpp"
#include "hoplab/rates.hpp"
#include "hoplab/walker.hpp"

namespace hoplab {

using json = nlohmann::json;

json to_json(const SpacingLaw& law);
SpacingLaw spacing_law_from_json(const json& j);

json to_json(const EnergyLaw& law);
EnergyLaw energy_law_from_json(const json& j);

// {alpha, beta, u: "standard", kappa: number|"inf"}
json to_json(const RateModel& model);
RateModel rate_model_from_json(const json& j);

// {spacing_law, energy_law, seed, half_width, points: [{index, x, E}]}
json to_json(const Environment& env);

json to_json(const MsdEstimate& est);
json to_json(const DiffusionEstimate& est);

// CSV export of a trajectory: time,index,position
std::string trajectory_csv(const Trajectory& traj);

// Floating point values at full 17-significant-digit precision.
std::string format_double(double v);

}  // namespace hoplab
