#pragma once

#include <string>

#include <json.hpp>

#include "gpanel/dgp.hpp"
#include "gpanel/montecarlo.hpp"

namespace gpanel {

// JSON schemas are documented in the README; parsing throws ConfigError
// with the offending field named.
DgpConfig dgp_config_from_json(const nlohmann::json& j);
nlohmann::json dgp_config_to_json(const DgpConfig& config);

McConfig mc_config_from_json(const nlohmann::json& j);
nlohmann::json mc_config_to_json(const McConfig& cfg);

DgpConfig load_dgp_config(const std::string& path);
McConfig load_mc_config(const std::string& path);

}  // namespace gpanel
