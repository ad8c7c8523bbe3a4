#include "carsr/network.hpp"

#include <cmath>

#include "carsr/errors.hpp"
#include "carsr/tensor_ops.hpp"

namespace carsr::model {
namespace {

torch::Tensor lrelu(const torch::Tensor& x) { return torch::leaky_relu(x, kLeakySlope); }

void require_channels(const torch::Tensor& t, std::int64_t channels, const char* op) {
    if (!t.defined() || t.dim() != 4) throw ShapeError(std::string(op) + ": expected N x C x H x W input");
    if (t.size(1) != channels) {
        throw ShapeError(std::string(op) + ": expected " + std::to_string(channels) + " channels, got " +
                         std::to_string(t.size(1)));
    }
}

// Embedded-Gaussian non-local block with zero-initialized output projection.
torch::Tensor nonlocal_block(const ParameterStore& params, const std::string& prefix, const torch::Tensor& x) {
    const auto n = x.size(0), h = x.size(2), w = x.size(3);
    const auto theta = conv(params, prefix + ".theta", x).flatten(2);  // N x C' x HW
    const auto phi = conv(params, prefix + ".phi", x).flatten(2);
    const auto g = conv(params, prefix + ".g", x).flatten(2);
    const auto attention = torch::softmax(torch::matmul(theta.transpose(1, 2), phi), -1);  // N x HW x HW
    const auto y = torch::matmul(g, attention.transpose(1, 2)).reshape({n, g.size(1), h, w});
    return x + conv(params, prefix + ".out", y);
}

torch::Tensor resize_to(const torch::Tensor& x, std::int64_t h, std::int64_t w) {
    if (x.size(2) == h && x.size(3) == w) return x;
    namespace F = torch::nn::functional;
    return F::interpolate(x, F::InterpolateFuncOptions()
                                 .size(std::vector<int64_t>{h, w})
                                 .mode(torch::kBilinear)
                                 .align_corners(false));
}

}  // namespace

torch::Tensor conv(const ParameterStore& params, std::string_view name, const torch::Tensor& x) {
    const ConvLayer& layer = params.at(name);
    const ConvSpec& s = layer.spec;
    if (x.size(1) != s.in_channels) {
        throw ShapeError("layer " + s.name + " expects " + std::to_string(s.in_channels) + " channels, got " +
                         std::to_string(x.size(1)));
    }
    const int pad = s.dilation * (s.kernel / 2);
    return torch::conv2d(x, layer.weight, layer.bias, s.stride, pad, s.dilation);
}

torch::Tensor context_extract(const ParameterStore& params, const ModelConfig& cfg, const torch::Tensor& f) {
    require_channels(f, cfg.n_features, "context_extract");
    switch (cfg.context) {
        case ContextVariant::aspp: {
            std::vector<torch::Tensor> branches;
            for (int r : cfg.dilations) branches.push_back(conv(params, "context.aspp_r" + std::to_string(r), f));
            return conv(params, "context.fuse", torch::cat(branches, 1));
        }
        case ContextVariant::sequential_atrous: {
            torch::Tensor x = f;
            for (int r : cfg.dilations) x = conv(params, "context.atrous_r" + std::to_string(r), x);
            return conv(params, "context.fuse", x);
        }
        case ContextVariant::nonlocal: {
            const auto h = f.size(2), w = f.size(3);
            const auto full = nonlocal_block(params, "context.scale1", f);
            const auto half_in = lrelu(conv(params, "context.scale2.down1", f));
            const auto half = resize_to(nonlocal_block(params, "context.scale2", half_in), h, w);
            const auto quarter_in =
                lrelu(conv(params, "context.scale4.down2", lrelu(conv(params, "context.scale4.down1", f))));
            const auto quarter = resize_to(nonlocal_block(params, "context.scale4", quarter_in), h, w);
            return conv(params, "context.fuse", torch::cat({full, half, quarter}, 1));
        }
    }
    throw ConfigError("ModelConfig.context_variant", "unhandled variant");
}

torch::Tensor residual_dense_block(const ParameterStore& params, const ModelConfig& cfg, const std::string& prefix,
                                   const torch::Tensor& x) {
    std::vector<torch::Tensor> features{x};
    for (int k = 1; k <= 4; ++k) {
        features.push_back(lrelu(conv(params, prefix + ".conv" + std::to_string(k), torch::cat(features, 1))));
    }
    const auto last = conv(params, prefix + ".conv5", torch::cat(features, 1));
    return x + cfg.residual_scale * last;
}

torch::Tensor rrdb(const ParameterStore& params, const ModelConfig& cfg, int index, const torch::Tensor& x) {
    const std::string prefix = "trunk.rrdb" + std::to_string(index) + ".rdb";
    torch::Tensor out = x;
    for (int d = 1; d <= 3; ++d) out = residual_dense_block(params, cfg, prefix + std::to_string(d), out);
    // Outer residual scales only what the dense blocks add, so an all-zero
    // RRDB is the identity.
    return x + cfg.residual_scale * (out - x);
}

torch::Tensor trunk(const ParameterStore& params, const ModelConfig& cfg, const torch::Tensor& f) {
    require_channels(f, cfg.n_features, "trunk");
    torch::Tensor x = f;
    for (int b = 0; b < cfg.num_rrdb; ++b) x = rrdb(params, cfg, b, x);
    return x;
}

torch::Tensor upsample_enhance(const ParameterStore& params, const ModelConfig& cfg, const torch::Tensor& f) {
    require_channels(f, cfg.n_features, "upsample_enhance");
    torch::Tensor image;
    if (cfg.upsample == UpsampleVariant::pixelshuffle) {
        image = pixel_shuffle(conv(params, "upsample.conv", f), cfg.scale);
    } else {
        namespace F = torch::nn::functional;
        torch::Tensor x = f;
        const auto stages = upconvolution_stages(cfg.scale);
        for (std::size_t i = 0; i < stages.size(); ++i) {
            const double factor = stages[i];
            x = F::interpolate(x, F::InterpolateFuncOptions()
                                      .scale_factor(std::vector<double>{factor, factor})
                                      .mode(torch::kNearest));
            x = lrelu(conv(params, "upsample.stage" + std::to_string(i + 1), x));
        }
        image = conv(params, "upsample.to_image", x);
    }
    return conv(params, "enhance2", conv(params, "enhance1", image));
}

torch::Tensor intermediate_car_head(const ParameterStore& params, const ModelConfig& cfg, const torch::Tensor& f_ctx,
                                    const torch::Tensor& lr) {
    if (!cfg.with_car_head) throw ConfigError("ModelConfig.with_car_head", "CAR head requested but not configured");
    require_channels(f_ctx, cfg.n_features, "intermediate_car_head");
    require_channels(lr, cfg.in_channels, "intermediate_car_head");
    return lr + conv(params, "car_head", f_ctx);
}

ForwardOutputs forward_all(const ParameterStore& params, const ModelConfig& cfg, const torch::Tensor& lr,
                           bool with_lr_estimate) {
    require_channels(lr, cfg.in_channels, "forward");
    ForwardOutputs out;
    const auto features = lrelu(conv(params, "head", lr));
    const auto context = context_extract(params, cfg, features);
    if (with_lr_estimate) out.lr_estimate = intermediate_car_head(params, cfg, context, lr);
    const auto deep = conv(params, "trunk_conv", trunk(params, cfg, context));
    out.sr_residual = upsample_enhance(params, cfg, deep);
    out.hr = bilinear_upsample(lr, cfg.scale) + out.sr_residual;
    return out;
}

torch::Tensor forward(const ParameterStore& params, const ModelConfig& cfg, const torch::Tensor& lr) {
    return forward_all(params, cfg, lr, false).hr;
}

}  // namespace carsr::model
