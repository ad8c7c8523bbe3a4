#pragma once

#include <limits>
#include <vector>

#include "carsr/image.hpp"

namespace carsr {

/// Single-channel double plane, used for luma on the 0-255 scale.
struct Plane {
    int height = 0;
    int width = 0;
    std::vector<double> values;

    double at(int y, int x) const { return values[static_cast<std::size_t>(y) * width + x]; }
    double& at(int y, int x) { return values[static_cast<std::size_t>(y) * width + x]; }
};

/// BT.601 luma from float RGB in [0, 1]: Y = 16 + 65.481 R + 128.553 G + 24.966 B,
/// i.e. the studio-swing [16, 235] range, computed before any quantization.
Plane rgb_to_y(const Image& img);

/// Drops `shave` pixels on every side. Throws DomainError if nothing is left.
Plane shave_border(const Plane& p, int shave);

inline constexpr double kPsnrInfinity = std::numeric_limits<double>::infinity();

/// 20 log10(255 / RMSE); identical planes give kPsnrInfinity.
double psnr(const Plane& a, const Plane& b);
double psnr_y(const Image& a, const Image& b, int shave);

// SSIM with an 11x11 Gaussian window (sigma 1.5), K1 = 0.01, K2 = 0.03,
// L = 255, averaged over all fully-inside window positions.
inline constexpr int kSsimWindow = 11;
inline constexpr double kSsimSigma = 1.5;

double ssim(const Plane& a, const Plane& b);
double ssim_y(const Image& a, const Image& b, int shave);

/// Normalized 1-D Gaussian taps of the SSIM window.
std::vector<double> ssim_gaussian_taps();

}  // namespace carsr
