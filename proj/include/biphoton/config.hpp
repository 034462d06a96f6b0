#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "biphoton/scenario.hpp"

namespace biphoton {

using json = nlohmann::json;

/// Scenario <-> config tree, keys matching the field names one-to-one.
/// A `format_version: 1` key is mandatory on the wire.
json scenario_to_json(const Scenario& s);
Scenario scenario_from_json(const json& j);

void save_scenario(const Scenario& s, const std::string& path);
Scenario load_scenario_file(const std::string& path);

/// Applies a dotted-path override `a.b.c=value` (value parsed as JSON when
/// possible, else taken as a string). Throws std::invalid_argument for
/// malformed expressions or unknown paths.
void apply_override(Scenario& s, const std::string& expression);

}  // namespace biphoton
