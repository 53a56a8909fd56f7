#pragma once

#include <string>
#include <vector>

#include "neseek/config.hpp"

namespace neseek {

/// Built-in scenarios exercising each flow in a regime where its behavior is
/// understood (documented in the README). Unknown names raise ConfigError
/// whose message lists the available presets.
ScenarioConfig preset(const std::string& name);
std::vector<std::string> preset_names();

} // namespace neseek
