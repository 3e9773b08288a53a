#pragma once

#include "prange/model.hpp"
#include "prange/ranges.hpp"

#include <json.hpp>

#include <map>
#include <string>

namespace prange {

struct RangeOutcome;

/// {"parameter","intervals":[{"lo","loClosed","hi","hiClosed"}],"seed","provenance"}
/// An unbounded hi is written as the string "inf".
nlohmann::json range_to_json(const ParameterRange& r);
ParameterRange range_from_json(const nlohmann::json& j);

nlohmann::json outcome_to_json(const RangeOutcome& r);
RangeOutcome outcome_from_json(const nlohmann::json& j);

/// Entities, constraints and parameters as loaded (angles in degrees).
nlohmann::json system_to_json(const ConstraintSystem& sys);

/// Coordinates keyed by entity, e.g. {"P1":{"x":0,"y":0}}.
nlohmann::json configuration_to_json(const ConstraintSystem& sys, const Configuration& c);

} // namespace prange
