#pragma once

#include <torch/torch.h>

#include "carsr/model_config.hpp"
#include "carsr/parameter_store.hpp"

namespace carsr::model {

// Functional CAJNN. Every stage is a pure function of (params, cfg, input)
// over N x C x H x W tensors; dtype follows the parameter store.

/// Applies one stored convolution ('same' padding for its dilation).
torch::Tensor conv(const ParameterStore& params, std::string_view name, const torch::Tensor& x);

/// Multi-scale context module on n_f-channel features, shape preserving.
torch::Tensor context_extract(const ParameterStore& params, const ModelConfig& cfg, const torch::Tensor& f);

/// One residual dense block: five densely connected convs, output scaled by
/// residual_scale and added to the input.
torch::Tensor residual_dense_block(const ParameterStore& params, const ModelConfig& cfg, const std::string& prefix,
                                   const torch::Tensor& x);
/// Three residual dense blocks wrapped in a second scaled residual:
/// x + residual_scale * (rdb3(rdb2(rdb1(x))) - x).
torch::Tensor rrdb(const ParameterStore& params, const ModelConfig& cfg, int index, const torch::Tensor& x);
/// num_rrdb RRDBs in sequence.
torch::Tensor trunk(const ParameterStore& params, const ModelConfig& cfg, const torch::Tensor& f);

/// Upsampler plus the two enhancement convs; returns the HR residual I^SR.
torch::Tensor upsample_enhance(const ParameterStore& params, const ModelConfig& cfg, const torch::Tensor& f);

/// LR-domain artifact-free estimate from context features: conv + input skip.
/// Throws ConfigError unless cfg.with_car_head.
torch::Tensor intermediate_car_head(const ParameterStore& params, const ModelConfig& cfg, const torch::Tensor& f_ctx,
                                    const torch::Tensor& lr);

struct ForwardOutputs {
    torch::Tensor hr;           // bilinear(lr) + I^SR
    torch::Tensor sr_residual;  // I^SR
    torch::Tensor lr_estimate;  // undefined unless requested
};

/// Full network; `with_lr_estimate` additionally evaluates the CAR head.
ForwardOutputs forward_all(const ParameterStore& params, const ModelConfig& cfg, const torch::Tensor& lr,
                           bool with_lr_estimate = false);

/// c x sh x sw output = bilinear_upsample(lr, s) + I^SR; no clamping.
torch::Tensor forward(const ParameterStore& params, const ModelConfig& cfg, const torch::Tensor& lr);

}  // namespace carsr::model
