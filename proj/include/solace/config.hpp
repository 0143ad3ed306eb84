#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "solace/engine.hpp"

namespace solace {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EnvironmentFiles {
  std::filesystem::path buildings;
  std::filesystem::path roads;
  std::filesystem::path safe_areas;
  std::filesystem::path soil;
  EnvironmentOptions options;
};

struct RunConfig {
  EnvironmentFiles environment;
  std::vector<Scenario> scenarios = standard_scenarios();
  uint64_t seed = 1;
  ModelConfig model;
  SimConfig sim;

  const Scenario* scenario(const std::string& name) const;
};

// Parses a config document on top of the built-in defaults. Unknown keys and
// ill-typed values throw ConfigError naming the offending key. Relative file
// paths resolve against `base_dir`.
RunConfig config_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
nlohmann::json config_to_json(const RunConfig& config);

// "a.b.c=value"; value is parsed as JSON when possible, else taken as a string.
// Array elements are addressed by index ("scenarios.0.intensity").
void apply_override(nlohmann::json& doc, const std::string& assignment);

RunConfig load_config(const std::filesystem::path& file, const std::vector<std::string>& overrides = {});

Environment load_environment(const EnvironmentFiles& files);

}  // namespace solace
