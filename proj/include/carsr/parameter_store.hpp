#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <torch/torch.h>

#include "carsr/model_config.hpp"

namespace carsr::model {

enum class InitRule {
    kaiming,           // fan-in normal for leaky-ReLU(0.2), convs followed by the activation
    linear,            // fan-in normal with unit gain, convs feeding no activation
    kaiming_residual,  // the same scaled by 0.1, for convs inside residual branches
    zeros,
};

/// Static description of one convolution in the architecture graph.
struct ConvSpec {
    std::string name;
    int in_channels = 0;
    int out_channels = 0;
    int kernel = 3;
    int dilation = 1;
    int stride = 1;
    InitRule init = InitRule::kaiming;

    std::int64_t weight_count() const {
        return static_cast<std::int64_t>(out_channels) * in_channels * kernel * kernel;
    }
    std::int64_t param_count() const { return weight_count() + out_channels; }
    std::vector<std::int64_t> weight_shape() const { return {out_channels, in_channels, kernel, kernel}; }
};

struct ConvLayer {
    ConvSpec spec;
    torch::Tensor weight;  // out x in x k x k
    torch::Tensor bias;    // out
};

/// All learnable weights of a network, keyed by layer name, in graph order.
class ParameterStore {
public:
    void add(ConvLayer layer);

    bool contains(std::string_view name) const;
    const ConvLayer& at(std::string_view name) const;
    ConvLayer& at(std::string_view name);

    std::span<const ConvLayer> layers() const noexcept { return layers_; }
    std::span<ConvLayer> layers() noexcept { return layers_; }
    std::size_t size() const noexcept { return layers_.size(); }
    bool empty() const noexcept { return layers_.empty(); }

    /// weight, bias, weight, bias, ... in graph order.
    std::vector<torch::Tensor> tensors() const;

    /// Deep copy, optionally converted to another dtype.
    ParameterStore clone() const;
    ParameterStore to(torch::ScalarType dtype) const;
    void set_requires_grad(bool on);

private:
    std::vector<ConvLayer> layers_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Every convolution of the architecture described by `cfg`, in graph order:
/// head, context module, optional CAR head, RRDB trunk, trunk conv, upsampler,
/// two enhancement convs.
std::vector<ConvSpec> layer_inventory(const ModelConfig& cfg);

/// Deterministic initialization: one mt19937_64 stream seeded with `seed`
/// drawn layer by layer in graph order. All biases start at zero.
ParameterStore build_model(const ModelConfig& cfg, std::uint64_t seed);

std::int64_t count_params(const ParameterStore& params);
std::int64_t count_params(std::span<const ConvSpec> inventory);
/// Parameters of layers whose name starts with `prefix` (e.g. "context.").
std::int64_t count_params(std::span<const ConvSpec> inventory, std::string_view prefix);

/// Standard deviation used for a layer's weights.
double init_std(const ConvSpec& spec);

}  // namespace carsr::model
