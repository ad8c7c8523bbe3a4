#pragma once

#include <cstdint>
#include <filesystem>

#include "carsr/image.hpp"

namespace carsr::fixtures {

/// Procedural RGB scene: smooth illumination gradient, hard-edged shapes,
/// oriented stripe textures and mild grain. Deterministic in `seed`.
Image synthetic_scene(int height, int width, std::uint64_t seed);

/// Writes `count` scenes as scene_000.png, scene_001.png, ... into `dir`.
void write_scene_set(const std::filesystem::path& dir, int count, int height, int width, std::uint64_t seed);

}  // namespace carsr::fixtures
