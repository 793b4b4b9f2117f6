#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "netfuzz/grnn.hpp"

namespace netfuzz {

// Versioned binary container: named f64 tensors with shape headers plus a
// named u64 metadata section. Round-trips bit-exactly.
struct Checkpoint {
  std::vector<std::pair<std::string, Tensor2>> tensors;
  std::map<std::string, uint64_t> meta;
};

std::string checkpoint_to_bytes(const Checkpoint& c);
Checkpoint checkpoint_from_bytes(const std::string& bytes);

/// Writes `path` (binary) and `path.json` (ModelConfig sidecar).
void save_model(const GrnnModel& m, const std::string& path);
GrnnModel load_model(const std::string& path);

std::string model_config_json(const ModelConfig& c);
ModelConfig model_config_from_json(const std::string& text);

}  // namespace netfuzz
