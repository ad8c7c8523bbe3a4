#include "carsr/parameter_store.hpp"

#include <cmath>
#include <random>

#include "carsr/errors.hpp"

namespace carsr::model {

void ParameterStore::add(ConvLayer layer) {
    if (index_.contains(layer.spec.name)) throw ConfigError("ParameterStore", "duplicate layer " + layer.spec.name);
    index_.emplace(layer.spec.name, layers_.size());
    layers_.push_back(std::move(layer));
}

bool ParameterStore::contains(std::string_view name) const { return index_.contains(std::string(name)); }

const ConvLayer& ParameterStore::at(std::string_view name) const {
    const auto it = index_.find(std::string(name));
    if (it == index_.end()) throw ConfigError("ParameterStore", "no layer named " + std::string(name));
    return layers_[it->second];
}

ConvLayer& ParameterStore::at(std::string_view name) {
    return const_cast<ConvLayer&>(std::as_const(*this).at(name));
}

std::vector<torch::Tensor> ParameterStore::tensors() const {
    std::vector<torch::Tensor> out;
    out.reserve(layers_.size() * 2);
    for (const auto& l : layers_) {
        out.push_back(l.weight);
        out.push_back(l.bias);
    }
    return out;
}

ParameterStore ParameterStore::clone() const {
    ParameterStore out;
    for (const auto& l : layers_) out.add({l.spec, l.weight.detach().clone(), l.bias.detach().clone()});
    return out;
}

ParameterStore ParameterStore::to(torch::ScalarType dtype) const {
    ParameterStore out;
    for (const auto& l : layers_) {
        out.add({l.spec, l.weight.detach().to(dtype).clone(), l.bias.detach().to(dtype).clone()});
    }
    return out;
}

void ParameterStore::set_requires_grad(bool on) {
    for (auto& l : layers_) {
        l.weight.requires_grad_(on);
        l.bias.requires_grad_(on);
    }
}

namespace {

ConvSpec conv3(std::string name, int in, int out, InitRule init = InitRule::linear, int dilation = 1,
               int stride = 1) {
    return {std::move(name), in, out, 3, dilation, stride, init};
}

ConvSpec conv1(std::string name, int in, int out, InitRule init = InitRule::linear) {
    return {std::move(name), in, out, 1, 1, 1, init};
}

void append_nonlocal(std::vector<ConvSpec>& inv, const std::string& prefix, int nf) {
    const int inner = std::max(1, nf / 2);
    inv.push_back(conv1(prefix + ".theta", nf, inner));
    inv.push_back(conv1(prefix + ".phi", nf, inner));
    inv.push_back(conv1(prefix + ".g", nf, inner));
    // Zero output projection: each block starts as the identity.
    inv.push_back(conv1(prefix + ".out", inner, nf, InitRule::zeros));
}

}  // namespace

std::vector<ConvSpec> layer_inventory(const ModelConfig& cfg) {
    validate(cfg);
    const int nf = cfg.n_features;
    const int c = cfg.in_channels;
    std::vector<ConvSpec> inv;
    inv.push_back(conv3("head", c, nf, InitRule::kaiming));

    switch (cfg.context) {
        case ContextVariant::aspp:
            for (int r : cfg.dilations) inv.push_back(conv3("context.aspp_r" + std::to_string(r), nf, nf, InitRule::linear, r));
            inv.push_back(conv1("context.fuse", nf * static_cast<int>(cfg.dilations.size()), nf));
            break;
        case ContextVariant::sequential_atrous:
            for (int r : cfg.dilations) inv.push_back(conv3("context.atrous_r" + std::to_string(r), nf, nf, InitRule::linear, r));
            inv.push_back(conv1("context.fuse", nf, nf));
            break;
        case ContextVariant::nonlocal:
            // Three resolutions: full, 1/2 (one strided conv), 1/4 (two strided convs).
            append_nonlocal(inv, "context.scale1", nf);
            inv.push_back(conv3("context.scale2.down1", nf, nf, InitRule::kaiming, 1, 2));
            append_nonlocal(inv, "context.scale2", nf);
            inv.push_back(conv3("context.scale4.down1", nf, nf, InitRule::kaiming, 1, 2));
            inv.push_back(conv3("context.scale4.down2", nf, nf, InitRule::kaiming, 1, 2));
            append_nonlocal(inv, "context.scale4", nf);
            inv.push_back(conv1("context.fuse", 3 * nf, nf));
            break;
    }

    if (cfg.with_car_head) inv.push_back(conv3("car_head", nf, c));

    const int gc = cfg.growth_channels;
    for (int b = 0; b < cfg.num_rrdb; ++b) {
        for (int d = 1; d <= 3; ++d) {
            const std::string prefix = "trunk.rrdb" + std::to_string(b) + ".rdb" + std::to_string(d) + ".conv";
            for (int k = 0; k < 5; ++k) {
                const int out = k < 4 ? gc : nf;
                inv.push_back(conv3(prefix + std::to_string(k + 1), nf + k * gc, out, InitRule::kaiming_residual));
            }
        }
    }
    inv.push_back(conv3("trunk_conv", nf, nf));

    if (cfg.upsample == UpsampleVariant::pixelshuffle) {
        inv.push_back(conv3("upsample.conv", nf, c * cfg.scale * cfg.scale));
    } else {
        const auto stages = upconvolution_stages(cfg.scale);
        for (std::size_t i = 0; i < stages.size(); ++i) {
            inv.push_back(conv3("upsample.stage" + std::to_string(i + 1), nf, nf, InitRule::kaiming));
        }
        inv.push_back(conv3("upsample.to_image", nf, c));
    }
    inv.push_back(conv3("enhance1", c, c));
    inv.push_back(conv3("enhance2", c, c));
    return inv;
}

double init_std(const ConvSpec& spec) {
    const double fan_in = static_cast<double>(spec.in_channels) * spec.kernel * spec.kernel;
    const double kaiming = std::sqrt(2.0 / (1.0 + kLeakySlope * kLeakySlope)) / std::sqrt(fan_in);
    switch (spec.init) {
        case InitRule::kaiming: return kaiming;
        case InitRule::linear: return 1.0 / std::sqrt(fan_in);
        case InitRule::kaiming_residual: return 0.1 * kaiming;
        case InitRule::zeros: return 0.0;
    }
    return 0.0;
}

ParameterStore build_model(const ModelConfig& cfg, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    ParameterStore store;
    for (const ConvSpec& spec : layer_inventory(cfg)) {
        const double std_dev = init_std(spec);
        std::vector<float> values(static_cast<std::size_t>(spec.weight_count()), 0.0f);
        if (std_dev > 0.0) {
            std::normal_distribution<double> normal(0.0, std_dev);
            for (float& v : values) v = static_cast<float>(normal(rng));
        }
        torch::Tensor weight = torch::from_blob(values.data(), spec.weight_shape(), torch::kFloat32).clone();
        torch::Tensor bias = torch::zeros({spec.out_channels}, torch::kFloat32);
        store.add({spec, std::move(weight), std::move(bias)});
    }
    return store;
}

std::int64_t count_params(const ParameterStore& params) {
    std::int64_t total = 0;
    for (const auto& l : params.layers()) total += l.weight.numel() + l.bias.numel();
    return total;
}

std::int64_t count_params(std::span<const ConvSpec> inventory) {
    std::int64_t total = 0;
    for (const auto& s : inventory) total += s.param_count();
    return total;
}

std::int64_t count_params(std::span<const ConvSpec> inventory, std::string_view prefix) {
    std::int64_t total = 0;
    for (const auto& s : inventory) {
        if (std::string_view(s.name).starts_with(prefix)) total += s.param_count();
    }
    return total;
}

}  // namespace carsr::model
