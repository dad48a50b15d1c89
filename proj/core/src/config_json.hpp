#pragma once

#include <json.hpp>

#include "vecsim/report.hpp"

namespace vecsim::detail {

nlohmann::json config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const nlohmann::json& root);

}  // namespace vecsim::detail
