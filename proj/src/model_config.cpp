#include "carsr/model_config.hpp"

#include <algorithm>
#include <set>

#include "carsr/errors.hpp"

namespace carsr::model {

std::string to_string(ContextVariant v) {
    switch (v) {
        case ContextVariant::aspp: return "aspp";
        case ContextVariant::nonlocal: return "nonlocal";
        case ContextVariant::sequential_atrous: return "sequential_atrous";
    }
    return "?";
}

std::string to_string(UpsampleVariant v) {
    switch (v) {
        case UpsampleVariant::pixelshuffle: return "pixelshuffle";
        case UpsampleVariant::upconvolution: return "upconvolution";
    }
    return "?";
}

ContextVariant parse_context_variant(std::string_view name) {
    for (auto v : {ContextVariant::aspp, ContextVariant::nonlocal, ContextVariant::sequential_atrous}) {
        if (name == to_string(v)) return v;
    }
    throw ConfigError("ModelConfig.context_variant",
                      "unknown variant '" + std::string(name) + "' (valid: aspp, nonlocal, sequential_atrous)");
}

UpsampleVariant parse_upsample_variant(std::string_view name) {
    for (auto v : {UpsampleVariant::pixelshuffle, UpsampleVariant::upconvolution}) {
        if (name == to_string(v)) return v;
    }
    throw ConfigError("ModelConfig.upsample_variant",
                      "unknown variant '" + std::string(name) + "' (valid: pixelshuffle, upconvolution)");
}

std::vector<int> upconvolution_stages(int scale) {
    std::vector<int> stages;
    int rest = scale;
    while (rest % 2 == 0) {
        stages.push_back(2);
        rest /= 2;
    }
    if (rest == 3 && stages.empty()) {
        stages.push_back(3);
        rest = 1;
    }
    if (rest != 1) {
        throw ConfigError("ModelConfig.scale",
                          "upconvolution supports powers of two and 3, got " + std::to_string(scale));
    }
    return stages;
}

void validate(const ModelConfig& cfg) {
    if (cfg.scale < 1) throw ConfigError("ModelConfig.scale", "must be >= 1");
    if (cfg.in_channels < 1) throw ConfigError("ModelConfig.in_channels", "must be >= 1");
    if (cfg.n_features < 1) throw ConfigError("ModelConfig.n_features", "must be >= 1");
    if (cfg.num_rrdb < 0) throw ConfigError("ModelConfig.num_rrdb", "must be >= 0");
    if (cfg.growth_channels < 1) throw ConfigError("ModelConfig.growth_channels", "must be >= 1");
    if (!(cfg.residual_scale > 0.0)) throw ConfigError("ModelConfig.residual_scale", "must be > 0");
    if (cfg.dilations.empty()) throw ConfigError("ModelConfig.dilations", "must not be empty");
    std::set<int> seen;
    for (int r : cfg.dilations) {
        if (r < 1) throw ConfigError("ModelConfig.dilations", "dilation " + std::to_string(r) + " must be >= 1");
        if (!seen.insert(r).second) {
            throw ConfigError("ModelConfig.dilations", "duplicate dilation " + std::to_string(r));
        }
    }
    if (cfg.upsample == UpsampleVariant::upconvolution) upconvolution_stages(cfg.scale);
}

bool covers_jpeg_block(const ModelConfig& cfg) {
    if (cfg.dilations.empty()) return false;
    const int r_max = *std::max_element(cfg.dilations.begin(), cfg.dilations.end());
    return 2 * r_max + 1 >= 8;
}

void to_json(nlohmann::json& j, const ModelConfig& cfg) {
    j = nlohmann::json{{"scale", cfg.scale},
                       {"in_channels", cfg.in_channels},
                       {"n_features", cfg.n_features},
                       {"num_rrdb", cfg.num_rrdb},
                       {"dilations", cfg.dilations},
                       {"context_variant", to_string(cfg.context)},
                       {"upsample_variant", to_string(cfg.upsample)},
                       {"growth_channels", cfg.growth_channels},
                       {"residual_scale", cfg.residual_scale},
                       {"with_car_head", cfg.with_car_head}};
}

void from_json(const nlohmann::json& j, ModelConfig& cfg) {
    cfg.scale = j.at("scale").get<int>();
    cfg.in_channels = j.at("in_channels").get<int>();
    cfg.n_features = j.at("n_features").get<int>();
    cfg.num_rrdb = j.at("num_rrdb").get<int>();
    cfg.dilations = j.at("dilations").get<std::vector<int>>();
    cfg.context = parse_context_variant(j.at("context_variant").get<std::string>());
    cfg.upsample = parse_upsample_variant(j.at("upsample_variant").get<std::string>());
    cfg.growth_channels = j.at("growth_channels").get<int>();
    cfg.residual_scale = j.at("residual_scale").get<double>();
    cfg.with_car_head = j.at("with_car_head").get<bool>();
}

}  // namespace carsr::model
