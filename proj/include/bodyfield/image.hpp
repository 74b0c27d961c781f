#pragma once

#include "bodyfield/types.hpp"

#include <filesystem>
#include <vector>

namespace bodyfield {

/// Binary per-pixel foreground mask, row-major.
struct Mask {
    int width = 0, height = 0;
    std::vector<std::uint8_t> bits;

    Mask() = default;
    Mask(int w, int h, bool value = false)
        : width(w), height(h), bits(static_cast<std::size_t>(w) * h, value ? 1 : 0) {}

    bool at(int i, int j) const { return bits[static_cast<std::size_t>(j) * width + i] != 0; }
    void set(int i, int j, bool v) { bits[static_cast<std::size_t>(j) * width + i] = v ? 1 : 0; }
    bool inside(int i, int j) const { return i >= 0 && j >= 0 && i < width && j < height; }
    std::size_t count() const;
};

/// Linear RGB image with channel values nominally in [0, 1], row-major.
struct Image {
    int width = 0, height = 0;
    std::vector<Vec3> pixels;

    Image() = default;
    Image(int w, int h, const Vec3& fill = Vec3::Zero())
        : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

    const Vec3& at(int i, int j) const { return pixels[static_cast<std::size_t>(j) * width + i]; }
    Vec3& at(int i, int j) { return pixels[static_cast<std::size_t>(j) * width + i]; }
    /// Bilinear lookup at continuous image coordinates (pixel centers at +0.5),
    /// clamped to the border.
    Vec3 bilinear(double u, double v) const;
};

/// 8-bit grayscale (or any format, converted to gray); values >= 128 are foreground.
Mask read_mask_png(const std::filesystem::path& path);
void write_mask_png(const std::filesystem::path& path, const Mask& mask);

/// Any PNG, converted to RGB; alpha is discarded.
Image read_image_png(const std::filesystem::path& path);
/// 8-bit RGB; channels are clamped to [0, 1] and rounded.
void write_image_png(const std::filesystem::path& path, const Image& image);
/// 8-bit RGBA from straight (non-premultiplied) color and alpha.
void write_rgba_png(const std::filesystem::path& path, const Image& color,
                    const std::vector<double>& alpha);
/// 8-bit grayscale from values in [0, 1].
void write_gray_png(const std::filesystem::path& path, int width, int height,
                    const std::vector<double>& values);

}  // namespace bodyfield
