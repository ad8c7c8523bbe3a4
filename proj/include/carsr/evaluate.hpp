#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>
#include <torch/torch.h>

#include "carsr/image.hpp"
#include "carsr/model_config.hpp"
#include "carsr/parameter_store.hpp"
#include "carsr/testset.hpp"

namespace carsr::eval {

/// Average of T^-1(forward(T(lr))) over the 8 dihedral transforms.
torch::Tensor self_ensemble(const model::ParameterStore& params, const model::ModelConfig& cfg,
                            const torch::Tensor& lr);

/// Inference on one image: forward (or self-ensemble), then the export clamp to [0, 1].
Image super_resolve(const model::ParameterStore& params, const model::ModelConfig& cfg, const Image& lr,
                    bool ensembled);

struct ImageScore {
    std::string name;
    double psnr_y = 0.0;
    double ssim_y = 0.0;
    double runtime_s = 0.0;
    std::optional<std::string> error;  // set when the image failed; excluded from means
};

// An infinite PSNR (identical images) enters the mean as kPsnrCapDb unless
// exclude_infinite is set, in which case such rows are left out of the PSNR
// mean. The per-image value keeps the infinity. When every image is exact
// the mean itself is the infinite sentinel.
inline constexpr double kPsnrCapDb = 100.0;

struct EvalResult {
    std::vector<ImageScore> per_image;
    double mean_psnr_y = 0.0;
    double mean_ssim_y = 0.0;
    double runtime_total_s = 0.0;
    std::int64_t params = 0;
    int shave = 0;
    bool exclude_infinite = false;
    std::size_t failures = 0;
};

using Predictor = std::function<Image(const Image& lr)>;

struct EvalOptions {
    int shave = 4;
    bool exclude_infinite = false;
};

/// Scores `predict` on every pair; runtime covers predictor calls only.
EvalResult evaluate_dataset(const Predictor& predict, const std::vector<TestPair>& pairs, std::int64_t params,
                            const EvalOptions& options = {});

EvalResult evaluate_dataset(const model::ParameterStore& params, const model::ModelConfig& cfg,
                            const std::vector<TestPair>& pairs, bool ensembled, const EvalOptions& options = {});

/// Recomputes mean_psnr_y / mean_ssim_y / failures from per_image.
void recompute_means(EvalResult& result);

nlohmann::json to_json(const EvalResult& r);

}  // namespace carsr::eval
