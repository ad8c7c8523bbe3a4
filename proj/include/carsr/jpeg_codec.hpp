#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "carsr/image.hpp"

namespace carsr {

/// Baseline JPEG, YCbCr 4:2:0, integer slow DCT on both ends so output is
/// reproducible for a given codec build.
std::vector<std::uint8_t> encode_jpeg(const Rgb8& rgb, int quality);
Rgb8 decode_jpeg(std::span<const std::uint8_t> bytes);

/// Identity and version of the linked codec, recorded in manifests and reports.
std::string jpeg_codec_id();

/// Quantize to 8-bit sRGB, encode at `quality` in [1, 100], decode back to float.
Image jpeg_roundtrip(const Image& img, int quality);

}  // namespace carsr
