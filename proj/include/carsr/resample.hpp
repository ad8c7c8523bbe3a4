#pragma once

#include "carsr/image.hpp"

namespace carsr {

/// Keys cubic convolution kernel with a = -0.5:
///   |x| <= 1:     1.5|x|^3 - 2.5|x|^2 + 1
///   1 < |x| < 2: -0.5|x|^3 + 2.5|x|^2 - 4|x| + 2
///   otherwise:    0
double cubic_kernel(double x);

/// Separable bicubic resize to an arbitrary size.
///
/// Output pixel i samples the input at (i + 0.5) / scale - 0.5. When
/// shrinking (scale < 1) the kernel is stretched by 1/scale to antialias, and
/// each tap set is renormalized to sum to one. Samples beyond the border are
/// mirrored symmetrically (index -1 reads 0, index n reads n - 1).
/// Accumulation is in double; no clamping.
Image resize_bicubic(const Image& img, int out_height, int out_width);

/// Antialiased bicubic downscale by an integer factor, clamped to [0, 1].
/// Throws ShapeError unless both sides are divisible by `scale`.
Image bicubic_downscale(const Image& img, int scale);

/// Bicubic upscale by an integer factor, clamped to [0, 1] (the usual SR baseline).
Image bicubic_upscale(const Image& img, int scale);

}  // namespace carsr
