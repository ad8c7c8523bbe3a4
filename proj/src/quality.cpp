#include "carsr/quality.hpp"

#include <cmath>
#include <string>

#include "carsr/errors.hpp"

namespace carsr {

Plane rgb_to_y(const Image& img) {
    if (img.channels() != 3) {
        throw ShapeError("rgb_to_y expects 3 channels, got " + std::to_string(img.channels()));
    }
    Plane y{img.height(), img.width(), std::vector<double>(img.plane_size())};
    const auto r = img.plane(0);
    const auto g = img.plane(1);
    const auto b = img.plane(2);
    for (std::size_t i = 0; i < y.values.size(); ++i) {
        y.values[i] = 16.0 + 65.481 * r[i] + 128.553 * g[i] + 24.966 * b[i];
    }
    return y;
}

Plane shave_border(const Plane& p, int shave) {
    if (shave < 0) throw DomainError("shave must be >= 0");
    if (2 * shave >= p.height || 2 * shave >= p.width) {
        throw DomainError("shave " + std::to_string(shave) + " leaves nothing of a " + std::to_string(p.height) + "x" +
                          std::to_string(p.width) + " image");
    }
    Plane out{p.height - 2 * shave, p.width - 2 * shave, {}};
    out.values.resize(static_cast<std::size_t>(out.height) * out.width);
    for (int y = 0; y < out.height; ++y) {
        for (int x = 0; x < out.width; ++x) out.at(y, x) = p.at(y + shave, x + shave);
    }
    return out;
}

namespace {

void check_same_shape(const Plane& a, const Plane& b) {
    if (a.height != b.height || a.width != b.width) {
        throw ShapeError("metric inputs differ in shape: " + std::to_string(a.height) + "x" + std::to_string(a.width) +
                         " vs " + std::to_string(b.height) + "x" + std::to_string(b.width));
    }
}

void check_same_shape(const Image& a, const Image& b) {
    if (!a.same_shape(b)) throw ShapeError("metric inputs differ in shape");
}

// Valid-mode separable filtering with the same taps on both axes.
Plane filter_valid(const Plane& p, const std::vector<double>& taps) {
    const int k = static_cast<int>(taps.size());
    const int oh = p.height - k + 1;
    const int ow = p.width - k + 1;
    Plane rows{p.height, ow, std::vector<double>(static_cast<std::size_t>(p.height) * ow)};
    for (int y = 0; y < p.height; ++y) {
        for (int x = 0; x < ow; ++x) {
            double acc = 0.0;
            for (int i = 0; i < k; ++i) acc += taps[static_cast<std::size_t>(i)] * p.at(y, x + i);
            rows.at(y, x) = acc;
        }
    }
    Plane out{oh, ow, std::vector<double>(static_cast<std::size_t>(oh) * ow)};
    for (int y = 0; y < oh; ++y) {
        for (int x = 0; x < ow; ++x) {
            double acc = 0.0;
            for (int i = 0; i < k; ++i) acc += taps[static_cast<std::size_t>(i)] * rows.at(y + i, x);
            out.at(y, x) = acc;
        }
    }
    return out;
}

Plane product(const Plane& a, const Plane& b) {
    Plane out{a.height, a.width, std::vector<double>(a.values.size())};
    for (std::size_t i = 0; i < a.values.size(); ++i) out.values[i] = a.values[i] * b.values[i];
    return out;
}

}  // namespace

double psnr(const Plane& a, const Plane& b) {
    check_same_shape(a, b);
    if (a.values.empty()) throw DomainError("psnr of empty planes");
    double sse = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        const double d = a.values[i] - b.values[i];
        sse += d * d;
    }
    if (sse == 0.0) return kPsnrInfinity;
    const double mse = sse / static_cast<double>(a.values.size());
    return 20.0 * std::log10(255.0 / std::sqrt(mse));
}

double psnr_y(const Image& a, const Image& b, int shave) {
    check_same_shape(a, b);
    return psnr(shave_border(rgb_to_y(a), shave), shave_border(rgb_to_y(b), shave));
}

std::vector<double> ssim_gaussian_taps() {
    std::vector<double> taps(kSsimWindow);
    const int half = kSsimWindow / 2;
    double sum = 0.0;
    for (int i = 0; i < kSsimWindow; ++i) {
        const double d = i - half;
        taps[static_cast<std::size_t>(i)] = std::exp(-d * d / (2.0 * kSsimSigma * kSsimSigma));
        sum += taps[static_cast<std::size_t>(i)];
    }
    for (double& t : taps) t /= sum;
    return taps;
}

double ssim(const Plane& a, const Plane& b) {
    check_same_shape(a, b);
    if (a.height < kSsimWindow || a.width < kSsimWindow) {
        throw DomainError("SSIM needs at least 11x11 pixels, got " + std::to_string(a.height) + "x" +
                          std::to_string(a.width));
    }
    constexpr double c1 = (0.01 * 255.0) * (0.01 * 255.0);
    constexpr double c2 = (0.03 * 255.0) * (0.03 * 255.0);
    const auto taps = ssim_gaussian_taps();
    const Plane mu_a = filter_valid(a, taps);
    const Plane mu_b = filter_valid(b, taps);
    const Plane aa = filter_valid(product(a, a), taps);
    const Plane bb = filter_valid(product(b, b), taps);
    const Plane ab = filter_valid(product(a, b), taps);
    double total = 0.0;
    for (std::size_t i = 0; i < mu_a.values.size(); ++i) {
        const double ma = mu_a.values[i];
        const double mb = mu_b.values[i];
        const double var_a = aa.values[i] - ma * ma;
        const double var_b = bb.values[i] - mb * mb;
        const double cov = ab.values[i] - ma * mb;
        total += ((2.0 * (ma * mb) + c1) * (2.0 * cov + c2)) / ((ma * ma + mb * mb + c1) * (var_a + var_b + c2));
    }
    return total / static_cast<double>(mu_a.values.size());
}

double ssim_y(const Image& a, const Image& b, int shave) {
    check_same_shape(a, b);
    return ssim(shave_border(rgb_to_y(a), shave), shave_border(rgb_to_y(b), shave));
}

}  // namespace carsr
