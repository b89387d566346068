#pragma once

#include "erw/distributions.hpp"
#include "json.hpp"

namespace erw {

/// Parses {"kind":"bernoulli","p":0.3}, {"kind":"discrete","points":[..],
/// "weights":[..]}, {"kind":"uniform","lo":0,"hi":1},
/// {"kind":"gaussian","mean":0,"stddev":1} or {"kind":"rademacher"}.
/// Throws InvalidDistribution on unknown kinds, missing or mistyped fields.
StepDistribution distribution_from_json(const nlohmann::json& j);

nlohmann::json distribution_to_json(const StepDistribution& dist);

nlohmann::json moment_set_to_json(const MomentSet& ms);

/// Reads a MomentSet written by moment_set_to_json (all eleven fields).
MomentSet moment_set_from_json(const nlohmann::json& j);

}  // namespace erw
