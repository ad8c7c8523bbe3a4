#pragma once

#include <set>
#include <utility>
#include <vector>

#include <torch/torch.h>

#include "carsr/image.hpp"

namespace carsr::model {

/// Sub-pixel rearrangement of an N x (C s^2) x H x W tensor into N x C x sH x sW:
///   out[n, c, y, x] = in[n, c s^2 + s (y mod s) + (x mod s), y / s, x / s].
/// A pure permutation of elements; differentiable.
torch::Tensor pixel_shuffle(const torch::Tensor& t, int scale);
/// Exact inverse of pixel_shuffle.
torch::Tensor pixel_unshuffle(const torch::Tensor& t, int scale);

/// (s n) x n interpolation matrix for half-pixel-centred bilinear upsampling:
/// output i samples the input at (i + 0.5) / s - 0.5, clamped to the border.
torch::Tensor bilinear_matrix(int size, int scale, torch::ScalarType dtype);

/// Bilinear upsampling of an N x C x H x W tensor by an integer factor,
/// computed as A_h X A_w^T with bilinear_matrix.
torch::Tensor bilinear_upsample(const torch::Tensor& t, int scale);

/// The 3x3 tap offsets {-r, 0, r}^2 of a dilated convolution.
std::set<std::pair<int, int>> dilation_offsets(int rate);

/// D4 action on the last two dims, matching carsr::dihedral on images.
torch::Tensor dihedral(const torch::Tensor& t, int transform_id);

/// 1 x C x H x W float32 tensor.
torch::Tensor to_tensor(const Image& img);
/// From C x H x W or 1 x C x H x W.
Image to_image(const torch::Tensor& t);
/// Stacks same-sized images into N x C x H x W.
torch::Tensor stack_images(const std::vector<const Image*>& images);

}  // namespace carsr::model
