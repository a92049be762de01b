#pragma once

#include <json.hpp>

#include "netdiff/chain.hpp"

namespace netdiff {

void to_json(nlohmann::json& j, const Hyperparameters& h);
/// Missing keys keep their current values, so a partial object overrides defaults.
void from_json(const nlohmann::json& j, Hyperparameters& h);
void to_json(nlohmann::json& j, const GibbsConfig& c);
void from_json(const nlohmann::json& j, GibbsConfig& c);

std::string to_string(PgMethod m);
PgMethod parse_pg_method(const std::string& name);

}  // namespace netdiff
