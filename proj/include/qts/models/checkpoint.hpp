#pragma once

#include <memory>
#include <string>

#include "qts/models/forecaster.hpp"

namespace qts::models {

/// JSON encode/decode of a ModelConfig (used by checkpoints, run configs and
/// manifests; field names are the documented config schema).
std::string model_config_to_json(const ModelConfig& cfg);
ModelConfig model_config_from_json(const std::string& text);

/// Checkpoint: schema version, the model configuration, and the flat
/// name -> {shape, data} parameter map, as portable JSON.
void save_checkpoint(const Forecaster& model, const std::string& path);
std::unique_ptr<Forecaster> load_checkpoint(const std::string& path);

}  // namespace qts::models
