#include "carsr/fixtures.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "carsr/synthesis.hpp"

namespace carsr::fixtures {
namespace {

using Color = std::array<float, 3>;

Color random_color(std::mt19937_64& rng) {
    std::uniform_real_distribution<float> u(0.05f, 0.95f);
    return {u(rng), u(rng), u(rng)};
}

}  // namespace

Image synthetic_scene(int height, int width, std::uint64_t seed) {
    std::mt19937_64 rng(derive_seed(seed, 0x5CE7E));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Image img(3, height, width);

    const Color top = random_color(rng);
    const Color bottom = random_color(rng);
    const double angle = unit(rng) * std::numbers::pi;
    const double ca = std::cos(angle), sa = std::sin(angle);
    const double diag = std::hypot(height, width);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const double t = std::clamp(0.5 + ((x - width / 2.0) * ca + (y - height / 2.0) * sa) / diag, 0.0, 1.0);
            for (int c = 0; c < 3; ++c) img.at(c, y, x) = static_cast<float>((1 - t) * top[c] + t * bottom[c]);
        }
    }

    // Ellipses and rectangles, some filled with a stripe texture.
    const int shapes = 6 + static_cast<int>(unit(rng) * 6);
    for (int s = 0; s < shapes; ++s) {
        const bool ellipse = unit(rng) < 0.5;
        const bool striped = unit(rng) < 0.4;
        const double cy = unit(rng) * height, cx = unit(rng) * width;
        const double ry = (0.05 + 0.2 * unit(rng)) * height, rx = (0.05 + 0.2 * unit(rng)) * width;
        const Color fill = random_color(rng);
        const Color alt = random_color(rng);
        const double period = 3.0 + 9.0 * unit(rng);
        const double theta = unit(rng) * std::numbers::pi;
        const double ct = std::cos(theta), st = std::sin(theta);
        const int y0 = std::max(0, static_cast<int>(cy - ry)), y1 = std::min(height - 1, static_cast<int>(cy + ry));
        const int x0 = std::max(0, static_cast<int>(cx - rx)), x1 = std::min(width - 1, static_cast<int>(cx + rx));
        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
                const double dy = (y - cy) / ry, dx = (x - cx) / rx;
                if (ellipse && dx * dx + dy * dy > 1.0) continue;
                double w = 0.0;
                if (striped) w = 0.5 + 0.5 * std::sin(2.0 * std::numbers::pi * (x * ct + y * st) / period);
                for (int c = 0; c < 3; ++c) img.at(c, y, x) = static_cast<float>((1 - w) * fill[c] + w * alt[c]);
            }
        }
    }

    // Thin lines at random orientation.
    const int lines = 3 + static_cast<int>(unit(rng) * 4);
    for (int l = 0; l < lines; ++l) {
        const double py = unit(rng) * height, px = unit(rng) * width;
        const double phi = unit(rng) * std::numbers::pi;
        const double ny = std::cos(phi), nx = -std::sin(phi);
        const double half = 0.6 + 1.2 * unit(rng);
        const Color ink = random_color(rng);
        for (int y = 0; y < height; ++y) {
            for (int x = 0; x < width; ++x) {
                if (std::abs((y - py) * ny + (x - px) * nx) <= half) {
                    for (int c = 0; c < 3; ++c) img.at(c, y, x) = ink[c];
                }
            }
        }
    }

    std::normal_distribution<float> grain(0.0f, 0.015f);
    for (float& v : img.data()) v = std::clamp(v + grain(rng), 0.0f, 1.0f);
    return img;
}

void write_scene_set(const std::filesystem::path& dir, int count, int height, int width, std::uint64_t seed) {
    std::filesystem::create_directories(dir);
    for (int i = 0; i < count; ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "scene_%03d.png", i);
        write_png(dir / name, synthetic_scene(height, width, derive_seed(seed, static_cast<std::uint64_t>(i))));
    }
}

}  // namespace carsr::fixtures
