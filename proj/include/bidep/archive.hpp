// Model archive: a self-contained binary file with a config echo, the
// vocabulary string tables, a tensor directory and a little-endian float64
// payload. Loading reproduces every tensor bit-exactly.
#pragma once

#include <cstdint>
#include <string>

#include "bidep/model.hpp"

namespace bidep {

constexpr std::uint32_t kArchiveVersion = 1;

// Key=value text describing the ModelConfig; stored in the archive so parsing
// needs no external config file.
std::string config_echo(const ModelConfig& config);
ModelConfig parse_config_echo(const std::string& text);

void save_model(const Model& model, const std::string& path);
Model load_model(const std::string& path);

}  // namespace bidep
