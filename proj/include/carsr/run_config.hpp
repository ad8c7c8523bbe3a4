#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "carsr/model_config.hpp"
#include "carsr/synthesis.hpp"
#include "carsr/train_config.hpp"

namespace carsr::cli {

struct Paths {
    std::string source_dir;      // training images (prepare-data)
    std::string manifest;        // manifest file (prepare-data writes, train / ablate read)
    std::string checkpoint_dir;  // train output, eval / preprocess fallback
    std::string checkpoint;      // explicit checkpoint for eval / preprocess
    std::string test_dir;        // clean evaluation images (eval, ablate)
    std::string report_dir;      // eval / ablate reports
    std::string input_dir;       // preprocess inputs
    std::string output_dir;      // preprocess outputs
    std::string log;             // training log, default <checkpoint_dir>/train_log.jsonl

    friend bool operator==(const Paths&, const Paths&) = default;
};

struct PrepareOptions {
    std::uint64_t count = 1000;
    std::uint64_t seed = 0;
    friend bool operator==(const PrepareOptions&, const PrepareOptions&) = default;
};

struct EvalCommandOptions {
    std::vector<int> qualities{10, 20, 40};
    bool ensemble = false;
    int shave = 4;
    bool exclude_infinite = false;
    friend bool operator==(const EvalCommandOptions&, const EvalCommandOptions&) = default;
};

struct AblateOptions {
    // "<context>+<upsampler>" pairs; the default is the full 3 x 2 matrix.
    std::vector<std::string> architectures{"aspp+pixelshuffle",
                                           "nonlocal+pixelshuffle",
                                           "sequential_atrous+pixelshuffle",
                                           "aspp+upconvolution",
                                           "nonlocal+upconvolution",
                                           "sequential_atrous+upconvolution"};
    std::vector<double> lambdas{0.0, 1.0, 16.0};
    int quality = 20;
    friend bool operator==(const AblateOptions&, const AblateOptions&) = default;
};

struct PreprocessOptions {
    bool downsample = false;
    friend bool operator==(const PreprocessOptions&, const PreprocessOptions&) = default;
};

/// Everything one command needs. Serialized as YAML with one top-level
/// section per struct: ModelConfig, TrainConfig, DegradeSpec, Paths,
/// Prepare, Eval, Ablate, Preprocess.
struct RunConfig {
    model::ModelConfig model;
    train::TrainConfig train;
    DegradeSpec degrade;
    bool desk_preset = false;  // TrainConfig.desk_preset in the file
    Paths paths;
    PrepareOptions prepare;
    EvalCommandOptions eval;
    AblateOptions ablate;
    PreprocessOptions preprocess;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Parses YAML text. Missing keys keep their defaults; unknown sections or
/// keys and malformed values raise ConfigError.
RunConfig parse_run_config(std::string_view yaml, const std::vector<std::string>& overrides = {});
RunConfig load_run_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});
std::string serialize_run_config(const RunConfig& cfg);

/// "Section.key=value" with a YAML value, e.g. "TrainConfig.total_iters=50"
/// or "ModelConfig.dilations=[1,2,4]".
void apply_override(RunConfig& cfg, std::string_view assignment);

/// FNV-1a 64 of the serialized config, as 16 hex digits.
std::string config_hash(const RunConfig& cfg);

}  // namespace carsr::cli
