#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bilayer/scenario.hpp"

namespace bilayer {

// Parsing collects every error (with line numbers) instead of failing fast.
struct ConfigParseResult {
  std::optional<ScenarioConfig> config;
  std::vector<std::string> errors;
  bool ok() const { return config.has_value() && errors.empty(); }
};

ConfigParseResult parse_config_text(const std::string& text);
ConfigParseResult parse_config_file(const std::string& path);

// Inverse of parsing: parse(serialize(c)) == c (17 significant digits).
std::string serialize_config(const ScenarioConfig& config);

}  // namespace bilayer
