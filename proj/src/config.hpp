#pragma once

// JSON round-tripping for the two user-facing configuration records.
// Parsing is strict: unknown keys and wrong types are invalid_argument, so
// typos in preset files or CLI payloads fail loudly instead of silently
// training something else.

#include "dataset.hpp"
#include "mlp.hpp"

#include "json.hpp"

namespace dphc {

nlohmann::json to_json(const GenSpec& spec);
GenSpec genspec_from_json(const nlohmann::json& j);

nlohmann::json to_json(const TrainConfig& config);
TrainConfig trainconfig_from_json(const nlohmann::json& j);

GenSpec genspec_from_text(const std::string& text);
TrainConfig trainconfig_from_text(const std::string& text);

}  // namespace dphc
