#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <json.hpp>
#include <torch/torch.h>

namespace carsr::train {

enum class LossType { L1, MSE, Charbonnier };

std::string to_string(LossType t);
LossType parse_loss_type(std::string_view name);

/// Charbonnier penalty sqrt(d^2 + eps^2); at d = 0 it evaluates to eps.
inline constexpr double kCharbonnierEps = 1e-3;

/// Mean-reduced pixel loss. Throws ShapeError on mismatched shapes.
torch::Tensor pixel_loss(const torch::Tensor& pred, const torch::Tensor& gt, LossType kind);

struct LossReport {
    std::int64_t iter = 0;
    double l_hr = 0.0;
    double l_lr = 0.0;  // 0 when the LR term is disabled
    double total = 0.0;
    double lr_value = 0.0;
};

nlohmann::json to_json(const LossReport& r);

struct CombinedLoss {
    torch::Tensor total;  // differentiable l_HR + lambda l_LR
    LossReport report;    // report.total = l_hr + lambda * l_lr, summed in double
};

/// l = l_HR + lambda l_LR. With lambda = 0 the LR pair is ignored (and may be
/// undefined); lambda > 0 without both LR tensors is a ConfigError.
CombinedLoss combined_loss(const torch::Tensor& out_hr, const torch::Tensor& gt_hr, const torch::Tensor& out_lr,
                           const torch::Tensor& gt_lr, double lambda, LossType kind = LossType::L1);

}  // namespace carsr::train
