#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace carsr::model {

enum class ContextVariant { aspp, nonlocal, sequential_atrous };
enum class UpsampleVariant { pixelshuffle, upconvolution };

std::string to_string(ContextVariant v);
std::string to_string(UpsampleVariant v);
/// Throw ConfigError listing the valid names on an unknown value.
ContextVariant parse_context_variant(std::string_view name);
UpsampleVariant parse_upsample_variant(std::string_view name);

struct ModelConfig {
    int scale = 4;
    int in_channels = 3;
    int n_features = 64;
    int num_rrdb = 20;
    std::vector<int> dilations{1, 3, 4};
    ContextVariant context = ContextVariant::aspp;
    UpsampleVariant upsample = UpsampleVariant::pixelshuffle;
    int growth_channels = 32;
    double residual_scale = 0.2;
    bool with_car_head = false;

    friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

inline constexpr double kLeakySlope = 0.2;

/// Throws ConfigError naming the first offending field.
void validate(const ModelConfig& cfg);

/// Span 2 r_max + 1 of the widest dilated 3x3 tap set reaches a full 8x8 JPEG block.
bool covers_jpeg_block(const ModelConfig& cfg);

/// Number of x2 (or a single x3) nearest-neighbour stages the upconvolution
/// variant needs for `scale`. Throws ConfigError for other factors.
std::vector<int> upconvolution_stages(int scale);

void to_json(nlohmann::json& j, const ModelConfig& cfg);
void from_json(const nlohmann::json& j, ModelConfig& cfg);

}  // namespace carsr::model
