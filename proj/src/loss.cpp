#include "carsr/loss.hpp"

#include "carsr/errors.hpp"

namespace carsr::train {

std::string to_string(LossType t) {
    switch (t) {
        case LossType::L1: return "L1";
        case LossType::MSE: return "MSE";
        case LossType::Charbonnier: return "Charbonnier";
    }
    return "?";
}

LossType parse_loss_type(std::string_view name) {
    for (auto t : {LossType::L1, LossType::MSE, LossType::Charbonnier}) {
        if (name == to_string(t)) return t;
    }
    throw ConfigError("TrainConfig.loss_type", "unknown loss '" + std::string(name) + "' (valid: L1, MSE, Charbonnier)");
}

torch::Tensor pixel_loss(const torch::Tensor& pred, const torch::Tensor& gt, LossType kind) {
    if (!pred.defined() || !gt.defined() || pred.sizes() != gt.sizes()) {
        throw ShapeError("pixel_loss: prediction and target shapes differ");
    }
    const auto diff = pred - gt;
    switch (kind) {
        case LossType::L1: return diff.abs().mean();
        case LossType::MSE: return diff.square().mean();
        case LossType::Charbonnier: return (diff.square() + kCharbonnierEps * kCharbonnierEps).sqrt().mean();
    }
    throw ConfigError("TrainConfig.loss_type", "unhandled loss");
}

nlohmann::json to_json(const LossReport& r) {
    return {{"iter", r.iter}, {"l_HR", r.l_hr}, {"l_LR", r.l_lr}, {"total", r.total}, {"lr", r.lr_value}};
}

CombinedLoss combined_loss(const torch::Tensor& out_hr, const torch::Tensor& gt_hr, const torch::Tensor& out_lr,
                           const torch::Tensor& gt_lr, double lambda, LossType kind) {
    if (!(lambda >= 0.0)) throw ConfigError("TrainConfig.lambda_recon", "must be >= 0");
    CombinedLoss out;
    const auto l_hr = pixel_loss(out_hr, gt_hr, kind);
    out.report.l_hr = l_hr.item<double>();
    if (lambda == 0.0) {
        out.total = l_hr;
        out.report.total = out.report.l_hr;
        return out;
    }
    if (!out_lr.defined() || !gt_lr.defined()) {
        throw ConfigError("TrainConfig.lambda_recon", "lambda > 0 requires the intermediate LR output and clean LR target");
    }
    const auto l_lr = pixel_loss(out_lr, gt_lr, kind);
    out.report.l_lr = l_lr.item<double>();
    out.total = l_hr + lambda * l_lr;
    out.report.total = out.report.l_hr + lambda * out.report.l_lr;
    return out;
}

}  // namespace carsr::train
