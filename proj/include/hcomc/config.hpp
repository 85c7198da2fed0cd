#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "hcomc/scenario.hpp"
#include "hcomc/world.hpp"

namespace hcomc {

// Parses a JSON config. An empty file yields all defaults; unknown keys and
// invalid values raise ConfigError naming the key path.
ScenarioConfig load_config(const std::filesystem::path& path);
ScenarioConfig parse_config(const std::string& text, const std::string& origin = "<string>");

// Shipped presets: "condition1" .. "condition5" (a bare digit also works).
std::vector<std::string> preset_names();
std::filesystem::path preset_path(const std::string& name);
ScenarioConfig load_preset(const std::string& name);

ControllerKind parse_controller(const std::string& s);
OptimizerKind parse_optimizer(const std::string& s);

}  // namespace hcomc
