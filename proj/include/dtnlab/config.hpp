#pragma once

#include <string>

#include "dtnlab/sim.hpp"

namespace dtnlab {

// Flat `key = value` scenario files; '#' starts a comment. Units are meters,
// seconds, and nodes/km^2. Unknown keys raise ConfigError.
SimConfig parse_sim_config(const std::string& text);
SimConfig load_sim_config(const std::string& path);
std::string dump_sim_config(const SimConfig& cfg);

// Named scenario presets: "paper" (the 5 km reference square) and "ci"
// (a 2 km desk-scale variant). Returns the suggested run count.
int apply_preset(SimConfig& cfg, const std::string& name);

}  // namespace dtnlab
