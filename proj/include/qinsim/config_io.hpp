#pragma once

#include <string>

#include <json.hpp>

#include "qinsim/core.hpp"
#include "qinsim/scenarios.hpp"

// Configuration file ingestion and serialization. JSON is the primary
// format; TOML files are accepted through a subset reader that lowers to
// the same JSON tree (see README for the subset). All keys are snake_case
// and map 1:1 to the domain-type fields; infinities serialize as "inf".

namespace qinsim {

using json = nlohmann::json;

inline constexpr int kConfigSchemaVersion = 1;

// Parses a TOML-subset document into a JSON tree. Throws std::runtime_error
// with a line number on malformed input.
json parse_toml(const std::string& text);

// Reads a config file, dispatching on extension (.json / .toml); anything
// else is tried as JSON first, then TOML.
json load_config_file(const std::string& path);

json network_to_json(const Network& network);
Network network_from_json(const json& j);

json scenario_params_to_json(const ScenarioParams& params);
ScenarioParams scenario_params_from_json(const json& j);

}  // namespace qinsim
