#include "carsr/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "carsr/errors.hpp"

namespace carsr {

Image::Image(int channels, int height, int width, float fill)
    : channels_(channels), height_(height), width_(width) {
    if (channels < 1 || height < 1 || width < 1) {
        throw ShapeError("image dimensions must be positive, got " + std::to_string(channels) + "x" +
                         std::to_string(height) + "x" + std::to_string(width));
    }
    data_.assign(static_cast<std::size_t>(channels) * height * width, fill);
}

Image Image::crop(int y, int x, int h, int w) const {
    if (y < 0 || x < 0 || h < 1 || w < 1 || y + h > height_ || x + w > width_) {
        throw ShapeError("crop [" + std::to_string(y) + "," + std::to_string(x) + " " + std::to_string(h) +
                         "x" + std::to_string(w) + "] outside " + std::to_string(height_) + "x" +
                         std::to_string(width_) + " image");
    }
    Image out(channels_, h, w);
    for (int c = 0; c < channels_; ++c) {
        for (int r = 0; r < h; ++r) {
            const float* src = &data_[index(c, y + r, x)];
            std::copy(src, src + w, &out.at(c, r, 0));
        }
    }
    return out;
}

Image Image::center_crop_to_multiple(int multiple) const {
    if (multiple < 1) throw DomainError("crop multiple must be >= 1");
    const int h = height_ / multiple * multiple;
    const int w = width_ / multiple * multiple;
    if (h == 0 || w == 0) {
        throw ShapeError("image " + std::to_string(height_) + "x" + std::to_string(width_) +
                         " smaller than scale " + std::to_string(multiple));
    }
    return crop((height_ - h) / 2, (width_ - w) / 2, h, w);
}

Image Image::clamped() const {
    Image out = *this;
    for (float& v : out.data_) v = std::clamp(v, 0.0f, 1.0f);
    return out;
}

Rgb8 to_rgb8(const Image& img) {
    if (img.channels() != 3) throw ShapeError("to_rgb8 expects 3 channels");
    Rgb8 out{img.height(), img.width(), {}};
    out.pixels.resize(static_cast<std::size_t>(img.height()) * img.width() * 3);
    std::size_t k = 0;
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            for (int c = 0; c < 3; ++c) {
                const float v = std::clamp(img.at(c, y, x), 0.0f, 1.0f);
                out.pixels[k++] = static_cast<std::uint8_t>(std::lround(v * 255.0f));
            }
        }
    }
    return out;
}

Image from_rgb8(const Rgb8& rgb) {
    Image out(3, rgb.height, rgb.width);
    std::size_t k = 0;
    for (int y = 0; y < rgb.height; ++y) {
        for (int x = 0; x < rgb.width; ++x) {
            for (int c = 0; c < 3; ++c) out.at(c, y, x) = static_cast<float>(rgb.pixels[k++]) / 255.0f;
        }
    }
    return out;
}

namespace {

void check_transform(int t) {
    if (t < 0 || t >= kDihedralCount) {
        throw DomainError("dihedral transform id must be in [0, 8), got " + std::to_string(t));
    }
}

Image rotate_ccw(const Image& img) {
    Image out(img.channels(), img.width(), img.height());
    const int w = img.width();
    for (int c = 0; c < img.channels(); ++c) {
        for (int y = 0; y < out.height(); ++y) {
            for (int x = 0; x < out.width(); ++x) out.at(c, y, x) = img.at(c, x, w - 1 - y);
        }
    }
    return out;
}

Image flip_horizontal(const Image& img) {
    Image out(img.channels(), img.height(), img.width());
    const int w = img.width();
    for (int c = 0; c < img.channels(); ++c) {
        for (int y = 0; y < img.height(); ++y) {
            for (int x = 0; x < w; ++x) out.at(c, y, x) = img.at(c, y, w - 1 - x);
        }
    }
    return out;
}

}  // namespace

Image dihedral(const Image& img, int transform_id) {
    check_transform(transform_id);
    Image out = transform_id >= 4 ? flip_horizontal(img) : img;
    for (int k = 0; k < (transform_id & 3); ++k) out = rotate_ccw(out);
    return out;
}

int dihedral_inverse(int transform_id) {
    check_transform(transform_id);
    // Pure rotations invert to the opposite rotation; every reflection is an involution.
    return transform_id < 4 ? (4 - transform_id) % 4 : transform_id;
}

int dihedral_compose(int a, int b) {
    check_transform(a);
    check_transform(b);
    // a = R^ka F^fa, b = R^kb F^fb, with F R = R^-1 F.
    const int ka = a & 3, fa = a >> 2;
    const int kb = b & 3, fb = b >> 2;
    const int k = fa ? (ka - kb + 4) % 4 : (ka + kb) % 4;
    return k | ((fa ^ fb) << 2);
}

}  // namespace carsr
