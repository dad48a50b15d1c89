#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include "vecsim/report.hpp"

namespace vecsim {

/// Reads a JSON config. Missing keys keep their defaults; unknown keys are
/// rejected. Each override is "dotted.key=value" where value is JSON or a
/// bare string, applied before parsing.
ExperimentConfig parse_config(std::string_view json_text,
                              std::span<const std::string> overrides = {});
ExperimentConfig load_config_file(const std::filesystem::path& path,
                                  std::span<const std::string> overrides = {});

/// Full effective config as pretty-printed JSON; parse_config() reads it back.
std::string dump_config(const ExperimentConfig& config);

}  // namespace vecsim
