#include "bodyfield/image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>

namespace bodyfield {

namespace {

std::vector<std::uint8_t> read_png(const std::filesystem::path& path, png_uint_32 format, int& w,
                                   int& h) {
    png_image img{};
    img.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&img, path.c_str()))
        throw ParseError(path.string() + ": " + img.message);
    img.format = format;
    std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(img));
    if (!png_image_finish_read(&img, nullptr, buf.data(), 0, nullptr)) {
        png_image_free(&img);
        throw ParseError(path.string() + ": " + img.message);
    }
    w = static_cast<int>(img.width);
    h = static_cast<int>(img.height);
    return buf;
}

void write_png(const std::filesystem::path& path, png_uint_32 format, int w, int h,
               const std::vector<std::uint8_t>& buf) {
    png_image img{};
    img.version = PNG_IMAGE_VERSION;
    img.width = static_cast<png_uint_32>(w);
    img.height = static_cast<png_uint_32>(h);
    img.format = format;
    if (!png_image_write_to_file(&img, path.c_str(), 0, buf.data(), 0, nullptr))
        throw Error(path.string() + ": " + img.message);
}

std::uint8_t to_byte(double v) {
    if (!(v > 0.0)) return 0;
    if (v >= 1.0) return 255;
    return static_cast<std::uint8_t>(std::lround(v * 255.0));
}

}  // namespace

std::size_t Mask::count() const {
    return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

Vec3 Image::bilinear(double u, double v) const {
    const double x = std::clamp(u - 0.5, 0.0, static_cast<double>(width - 1));
    const double y = std::clamp(v - 0.5, 0.0, static_cast<double>(height - 1));
    const int x0 = std::min(static_cast<int>(x), width - 1), y0 = std::min(static_cast<int>(y), height - 1);
    const int x1 = std::min(x0 + 1, width - 1), y1 = std::min(y0 + 1, height - 1);
    const double fx = x - x0, fy = y - y0;
    return (1 - fy) * ((1 - fx) * at(x0, y0) + fx * at(x1, y0)) +
           fy * ((1 - fx) * at(x0, y1) + fx * at(x1, y1));
}

Mask read_mask_png(const std::filesystem::path& path) {
    int w = 0, h = 0;
    const auto buf = read_png(path, PNG_FORMAT_GRAY, w, h);
    Mask m(w, h);
    for (std::size_t i = 0; i < buf.size(); ++i) m.bits[i] = buf[i] >= 128 ? 1 : 0;
    return m;
}

void write_mask_png(const std::filesystem::path& path, const Mask& mask) {
    std::vector<std::uint8_t> buf(mask.bits.size());
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = mask.bits[i] ? 255 : 0;
    write_png(path, PNG_FORMAT_GRAY, mask.width, mask.height, buf);
}

Image read_image_png(const std::filesystem::path& path) {
    int w = 0, h = 0;
    const auto buf = read_png(path, PNG_FORMAT_RGB, w, h);
    Image img(w, h);
    for (std::size_t i = 0; i < img.pixels.size(); ++i)
        img.pixels[i] = Vec3(buf[3 * i], buf[3 * i + 1], buf[3 * i + 2]) / 255.0;
    return img;
}

void write_image_png(const std::filesystem::path& path, const Image& image) {
    std::vector<std::uint8_t> buf(3 * image.pixels.size());
    for (std::size_t i = 0; i < image.pixels.size(); ++i)
        for (int c = 0; c < 3; ++c) buf[3 * i + c] = to_byte(image.pixels[i][c]);
    write_png(path, PNG_FORMAT_RGB, image.width, image.height, buf);
}

void write_rgba_png(const std::filesystem::path& path, const Image& color,
                    const std::vector<double>& alpha) {
    if (alpha.size() != color.pixels.size()) throw Error("alpha size does not match image");
    std::vector<std::uint8_t> buf(4 * color.pixels.size());
    for (std::size_t i = 0; i < color.pixels.size(); ++i) {
        for (int c = 0; c < 3; ++c) buf[4 * i + c] = to_byte(color.pixels[i][c]);
        buf[4 * i + 3] = to_byte(alpha[i]);
    }
    write_png(path, PNG_FORMAT_RGBA, color.width, color.height, buf);
}

void write_gray_png(const std::filesystem::path& path, int width, int height,
                    const std::vector<double>& values) {
    if (values.size() != static_cast<std::size_t>(width) * height)
        throw Error("gray image size mismatch");
    std::vector<std::uint8_t> buf(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) buf[i] = to_byte(values[i]);
    write_png(path, PNG_FORMAT_GRAY, width, height, buf);
}

}  // namespace bodyfield
