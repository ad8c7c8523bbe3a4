#include "carsr/tensor_ops.hpp"

#include <cmath>
#include <string>

#include "carsr/errors.hpp"

namespace carsr::model {

namespace {

void require_4d(const torch::Tensor& t, const char* op) {
    if (!t.defined() || t.dim() != 4) throw ShapeError(std::string(op) + " expects an N x C x H x W tensor");
}

}  // namespace

torch::Tensor pixel_shuffle(const torch::Tensor& t, int scale) {
    require_4d(t, "pixel_shuffle");
    if (scale < 1) throw DomainError("pixel_shuffle scale must be >= 1");
    const std::int64_t s = scale;
    const auto n = t.size(0), cs = t.size(1), h = t.size(2), w = t.size(3);
    if (cs % (s * s) != 0) {
        throw ShapeError("pixel_shuffle: " + std::to_string(cs) + " channels not divisible by " + std::to_string(s * s));
    }
    const auto c = cs / (s * s);
    return t.reshape({n, c, s, s, h, w}).permute({0, 1, 4, 2, 5, 3}).reshape({n, c, h * s, w * s});
}

torch::Tensor pixel_unshuffle(const torch::Tensor& t, int scale) {
    require_4d(t, "pixel_unshuffle");
    if (scale < 1) throw DomainError("pixel_unshuffle scale must be >= 1");
    const std::int64_t s = scale;
    const auto n = t.size(0), c = t.size(1), hs = t.size(2), ws = t.size(3);
    if (hs % s != 0 || ws % s != 0) throw ShapeError("pixel_unshuffle: spatial size not divisible by scale");
    const auto h = hs / s, w = ws / s;
    return t.reshape({n, c, h, s, w, s}).permute({0, 1, 3, 5, 2, 4}).reshape({n, c * s * s, h, w});
}

torch::Tensor bilinear_matrix(int size, int scale, torch::ScalarType dtype) {
    if (scale < 1) throw DomainError("bilinear scale must be >= 1, got " + std::to_string(scale));
    if (size < 1) throw ShapeError("bilinear_matrix: size must be >= 1");
    const int out = size * scale;
    auto m = torch::zeros({out, size}, torch::kFloat64);
    auto acc = m.accessor<double, 2>();
    for (int i = 0; i < out; ++i) {
        const double src = (i + 0.5) / scale - 0.5;
        const int lo = static_cast<int>(std::floor(src));
        const double frac = src - lo;
        const int i0 = std::clamp(lo, 0, size - 1);
        const int i1 = std::clamp(lo + 1, 0, size - 1);
        acc[i][i0] += 1.0 - frac;
        acc[i][i1] += frac;
    }
    return m.to(dtype);
}

torch::Tensor bilinear_upsample(const torch::Tensor& t, int scale) {
    require_4d(t, "bilinear_upsample");
    if (scale < 1) throw DomainError("bilinear scale must be >= 1, got " + std::to_string(scale));
    if (scale == 1) return t.clone();
    const auto dtype = t.scalar_type();
    const auto rows = bilinear_matrix(static_cast<int>(t.size(2)), scale, dtype);
    const auto cols = bilinear_matrix(static_cast<int>(t.size(3)), scale, dtype);
    return torch::matmul(torch::matmul(rows, t), cols.t());
}

std::set<std::pair<int, int>> dilation_offsets(int rate) {
    if (rate < 1) throw DomainError("dilation rate must be >= 1, got " + std::to_string(rate));
    std::set<std::pair<int, int>> out;
    for (int dy : {-rate, 0, rate}) {
        for (int dx : {-rate, 0, rate}) out.emplace(dy, dx);
    }
    return out;
}

torch::Tensor dihedral(const torch::Tensor& t, int transform_id) {
    if (transform_id < 0 || transform_id >= kDihedralCount) {
        throw DomainError("dihedral transform id must be in [0, 8)");
    }
    const auto d = t.dim();
    torch::Tensor out = transform_id >= 4 ? torch::flip(t, {d - 1}) : t;
    const int turns = transform_id & 3;
    if (turns != 0) out = torch::rot90(out, turns, {d - 2, d - 1});
    return out;
}

torch::Tensor to_tensor(const Image& img) {
    auto data = img.data();
    return torch::from_blob(const_cast<float*>(data.data()), {1, img.channels(), img.height(), img.width()},
                            torch::kFloat32)
        .clone();
}

Image to_image(const torch::Tensor& t) {
    torch::Tensor x = t.detach();
    if (x.dim() == 4) {
        if (x.size(0) != 1) throw ShapeError("to_image expects a single image");
        x = x[0];
    }
    if (x.dim() != 3) throw ShapeError("to_image expects C x H x W");
    x = x.to(torch::kFloat32).contiguous();
    Image img(static_cast<int>(x.size(0)), static_cast<int>(x.size(1)), static_cast<int>(x.size(2)));
    std::memcpy(img.data().data(), x.data_ptr<float>(), img.size() * sizeof(float));
    return img;
}

torch::Tensor stack_images(const std::vector<const Image*>& images) {
    if (images.empty()) throw ShapeError("stack_images: empty batch");
    std::vector<torch::Tensor> parts;
    parts.reserve(images.size());
    for (const Image* img : images) {
        if (!img->same_shape(*images.front())) throw ShapeError("stack_images: images differ in shape");
        parts.push_back(to_tensor(*img));
    }
    return torch::cat(parts, 0);
}

}  // namespace carsr::model
