#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "survbench/binary.hpp"
#include "survbench/cox.hpp"
#include "survbench/mixture.hpp"

namespace survbench {

// JSON documents for fitted models: mode tag, penalty, named coefficients,
// and the model-specific pieces (baseline hazard, subgroup rates and curves).
nlohmann::json model_to_json(const FittedLinearModel& model,
                             const std::vector<std::string>& names);
nlohmann::json model_to_json(const CoxModel& model, const std::vector<std::string>& names);
nlohmann::json model_to_json(const MixtureDurationModel& model,
                             const std::vector<std::string>& names);

nlohmann::json curve_to_json(const StepSurvivalCurve& curve);
StepSurvivalCurve curve_from_json(const nlohmann::json& j);

}  // namespace survbench
