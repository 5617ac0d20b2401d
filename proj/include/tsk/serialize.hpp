#pragma once

#include <string>

#include <json.hpp>

#include "tsk/model.hpp"

namespace tsk {

/// Model as a JSON document:
///   {"mf_type": "gaussian"|"trapezoid", "num_features": M,
///    "rules": [{"antecedents": [...], "bias": w0, "weights": [...]}]}
/// Antecedent entries are {"center","spread"} or {"a","b","c","d"}.
/// Doubles round-trip exactly.
nlohmann::json model_to_json(const TskModel& model);

/// Inverse of model_to_json; unknown sibling keys are ignored.
TskModel model_from_json(const nlohmann::json& doc);

void save_model(const TskModel& model, const std::string& path);
TskModel load_model(const std::string& path);

} // namespace tsk
