#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>
#include <torch/torch.h>

#include "carsr/model_config.hpp"
#include "carsr/parameter_store.hpp"

namespace carsr::model {

// Checkpoint file layout (all integers little-endian):
//
//   offset  size  field
//   0       8     magic "CARSRCKP"
//   8       4     uint32 format version (1)
//   12      4     uint32 reserved, 0
//   16      8     uint64 H, byte length of the JSON header
//   24      H     UTF-8 JSON header
//   24 + H  ...   blob section
//
// The header holds "iteration", "model_config", "train_state" (free-form,
// may be null) and "tensors": an array of {name, shape, dtype: "f32le",
// offset, nbytes}, offsets relative to the start of the blob section. Blobs
// are raw row-major float32 and packed back to back in array order. Model
// weights are named "<layer>.weight" / "<layer>.bias"; any extra tensors
// (optimizer moments) follow them with their own prefixes.

inline constexpr char kCheckpointMagic[8] = {'C', 'A', 'R', 'S', 'R', 'C', 'K', 'P'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
    ModelConfig model;
    std::int64_t iteration = 0;
    ParameterStore params;
    nlohmann::json train_state;  // null when absent
    std::vector<std::pair<std::string, torch::Tensor>> extra;
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);

/// Reads a checkpoint and validates its weights against the layer inventory
/// of its own model config. Throws IncompatibleCheckpoint on any mismatch.
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Throws IncompatibleCheckpoint when `params` do not have exactly the layers
/// and shapes that `cfg` requires.
void check_compatible(const ParameterStore& params, const ModelConfig& cfg);

}  // namespace carsr::model
