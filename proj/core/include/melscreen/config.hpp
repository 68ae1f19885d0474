#pragma once

#include <filesystem>
#include <string>

#include "melscreen/pipeline.hpp"

namespace melscreen {

// JSON with keys mirroring every PipelineConfig default; missing keys keep
// their defaults, unknown keys are errors naming the key.
PipelineConfig parse_config_json(const std::string& text);
PipelineConfig load_config_file(const std::filesystem::path& path);

// Canonical serialization (sorted keys); the basis of config_hash.
std::string config_to_json(const PipelineConfig& config);

// 16-hex-digit content hash embedded in run outputs and cache sidecars.
std::string config_hash(const PipelineConfig& config);

}  // namespace melscreen
