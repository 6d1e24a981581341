#pragma once

#include <json.hpp>

#include "ifsc/corpus.hpp"

namespace ifsc::detail {

nlohmann::json split_config_to_json(const SplitConfig& config);

// Lenient: missing fields keep their defaults; malformed structure throws
// ConfigError. Callers run SplitConfig::validate() before using the result.
SplitConfig split_config_from_json(const nlohmann::json& j);

}  // namespace ifsc::detail
