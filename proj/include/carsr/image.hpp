#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace carsr {

/// Planar float image, channels x height x width, nominal range [0, 1].
///
/// Used for everything outside the network: file I/O, degradation synthesis
/// and the quality metrics. The network itself works on NCHW torch tensors;
/// see tensor_ops.hpp for conversions.
class Image {
public:
    Image() = default;
    Image(int channels, int height, int width, float fill = 0.0f);

    int channels() const noexcept { return channels_; }
    int height() const noexcept { return height_; }
    int width() const noexcept { return width_; }
    std::size_t plane_size() const noexcept {
        return static_cast<std::size_t>(height_) * static_cast<std::size_t>(width_);
    }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    float& at(int c, int y, int x) noexcept { return data_[index(c, y, x)]; }
    float at(int c, int y, int x) const noexcept { return data_[index(c, y, x)]; }

    std::span<float> plane(int c) noexcept { return {data_.data() + c * plane_size(), plane_size()}; }
    std::span<const float> plane(int c) const noexcept {
        return {data_.data() + c * plane_size(), plane_size()};
    }

    std::span<float> data() noexcept { return data_; }
    std::span<const float> data() const noexcept { return data_; }

    bool same_shape(const Image& other) const noexcept {
        return channels_ == other.channels_ && height_ == other.height_ && width_ == other.width_;
    }

    /// Sub-image [y, y+h) x [x, x+w). Throws ShapeError when out of bounds.
    Image crop(int y, int x, int h, int w) const;

    /// Largest centered crop whose sides are multiples of `multiple`.
    Image center_crop_to_multiple(int multiple) const;

    /// Clamp every sample to [0, 1].
    Image clamped() const;

    friend bool operator==(const Image&, const Image&) = default;

private:
    std::size_t index(int c, int y, int x) const noexcept {
        return (static_cast<std::size_t>(c) * height_ + y) * width_ + x;
    }

    int channels_ = 0;
    int height_ = 0;
    int width_ = 0;
    std::vector<float> data_;
};

/// Interleaved 8-bit RGB buffer, the exchange format for codecs.
struct Rgb8 {
    int height = 0;
    int width = 0;
    std::vector<std::uint8_t> pixels;  // row-major, RGBRGB...
};

/// Quantizes a 3-channel image to 8 bits (clamp to [0,1], round half away from zero).
Rgb8 to_rgb8(const Image& img);
Image from_rgb8(const Rgb8& rgb);

// Dihedral group D4 acting on square-grid images. Transform t in [0, 8):
// t & 3 counter-clockwise quarter turns, applied after a horizontal flip
// when t >= 4.
inline constexpr int kDihedralCount = 8;

Image dihedral(const Image& img, int transform_id);
int dihedral_inverse(int transform_id);
/// Id of the transform `a` applied after `b`.
int dihedral_compose(int a, int b);

Image read_image(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const Image& img);
void write_jpeg(const std::filesystem::path& path, const Image& img, int quality);

/// Files in `dir` with a png/jpg/jpeg extension, sorted by file name.
std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir);

}  // namespace carsr
