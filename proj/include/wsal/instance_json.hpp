#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "wsal/world.hpp"

namespace wsal {

// Keys: family, nu, weak_mode, g, p, beta, seed. Missing keys keep their
// defaults; unknown keys are rejected.
void to_json(nlohmann::json& j, const InstanceSpec& s);
void from_json(const nlohmann::json& j, InstanceSpec& s);

/// Parses a single spec object or an array of them.
std::vector<InstanceSpec> parse_instances(const std::string& text);
std::vector<InstanceSpec> load_instances(const std::string& path);

}  // namespace wsal
