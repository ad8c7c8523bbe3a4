#include "carsr/resample.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "carsr/errors.hpp"

namespace carsr {

double cubic_kernel(double x) {
    const double ax = std::abs(x);
    const double ax2 = ax * ax;
    const double ax3 = ax2 * ax;
    if (ax <= 1.0) return 1.5 * ax3 - 2.5 * ax2 + 1.0;
    if (ax < 2.0) return -0.5 * ax3 + 2.5 * ax2 - 4.0 * ax + 2.0;
    return 0.0;
}

namespace {

struct Taps {
    int first = 0;                // unmirrored index of weights[0]
    std::vector<double> weights;  // normalized to sum to one
};

int mirror(int i, int n) {
    const int period = 2 * n;
    int m = i % period;
    if (m < 0) m += period;
    return m < n ? m : period - 1 - m;
}

std::vector<Taps> axis_taps(int in_size, int out_size) {
    const double scale = static_cast<double>(out_size) / in_size;
    const double stretch = scale < 1.0 ? 1.0 / scale : 1.0;
    const double support = 2.0 * stretch;
    std::vector<Taps> taps(static_cast<std::size_t>(out_size));
    for (int i = 0; i < out_size; ++i) {
        const double center = (i + 0.5) / scale - 0.5;
        const int lo = static_cast<int>(std::floor(center - support));
        const int hi = static_cast<int>(std::ceil(center + support));
        Taps& t = taps[static_cast<std::size_t>(i)];
        t.first = lo;
        double sum = 0.0;
        for (int j = lo; j <= hi; ++j) {
            const double w = cubic_kernel((j - center) / stretch);
            t.weights.push_back(w);
            sum += w;
        }
        for (double& w : t.weights) w /= sum;
    }
    return taps;
}

}  // namespace

Image resize_bicubic(const Image& img, int out_height, int out_width) {
    if (img.empty()) throw ShapeError("resize_bicubic: empty image");
    if (out_height < 1 || out_width < 1) throw DomainError("resize_bicubic: output size must be positive");
    const auto row_taps = axis_taps(img.height(), out_height);
    const auto col_taps = axis_taps(img.width(), out_width);

    Image out(img.channels(), out_height, out_width);
    std::vector<double> horizontal(static_cast<std::size_t>(img.height()) * out_width);
    for (int c = 0; c < img.channels(); ++c) {
        for (int y = 0; y < img.height(); ++y) {
            for (int x = 0; x < out_width; ++x) {
                const Taps& t = col_taps[static_cast<std::size_t>(x)];
                double acc = 0.0;
                for (std::size_t k = 0; k < t.weights.size(); ++k) {
                    acc += t.weights[k] * img.at(c, y, mirror(t.first + static_cast<int>(k), img.width()));
                }
                horizontal[static_cast<std::size_t>(y) * out_width + x] = acc;
            }
        }
        for (int y = 0; y < out_height; ++y) {
            const Taps& t = row_taps[static_cast<std::size_t>(y)];
            for (int x = 0; x < out_width; ++x) {
                double acc = 0.0;
                for (std::size_t k = 0; k < t.weights.size(); ++k) {
                    const int sy = mirror(t.first + static_cast<int>(k), img.height());
                    acc += t.weights[k] * horizontal[static_cast<std::size_t>(sy) * out_width + x];
                }
                out.at(c, y, x) = static_cast<float>(acc);
            }
        }
    }
    return out;
}

Image bicubic_downscale(const Image& img, int scale) {
    if (scale < 1) throw DomainError("scale must be >= 1, got " + std::to_string(scale));
    if (img.height() % scale != 0 || img.width() % scale != 0) {
        throw ShapeError("image " + std::to_string(img.height()) + "x" + std::to_string(img.width()) +
                         " not divisible by scale " + std::to_string(scale) + "; crop first");
    }
    if (scale == 1) return img.clamped();
    return resize_bicubic(img, img.height() / scale, img.width() / scale).clamped();
}

Image bicubic_upscale(const Image& img, int scale) {
    if (scale < 1) throw DomainError("scale must be >= 1, got " + std::to_string(scale));
    if (scale == 1) return img.clamped();
    return resize_bicubic(img, img.height() * scale, img.width() * scale).clamped();
}

}  // namespace carsr
