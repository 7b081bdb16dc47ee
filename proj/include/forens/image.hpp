#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "forens/errors.hpp"

namespace forens {

// Single-channel row-major grid of real samples. Decoded image planes hold
// values in [0, 255]; derived planes (DWT bands, LBP code maps) reuse the
// container without that range guarantee.
struct ImagePlane {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<double> samples;

    ImagePlane() = default;
    ImagePlane(std::size_t w, std::size_t h, double fill = 0.0)
        : width(w), height(h), samples(w * h, fill) {}

    double& at(std::size_t x, std::size_t y) { return samples[y * width + x]; }
    double at(std::size_t x, std::size_t y) const { return samples[y * width + x]; }
    std::size_t size() const { return samples.size(); }

    double energy() const {
        double e = 0.0;
        for (double s : samples) e += s * s;
        return e;
    }
};

struct YCbCrImage {
    ImagePlane y;
    ImagePlane cb;
    ImagePlane cr;

    std::size_t width() const { return y.width; }
    std::size_t height() const { return y.height; }
};

// Interleaved 8-bit RGB; working type for decoders and the synth generator.
struct RgbImage {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::uint8_t> data; // r,g,b per pixel, row-major

    RgbImage() = default;
    RgbImage(std::size_t w, std::size_t h) : width(w), height(h), data(w * h * 3, 0) {}

    std::uint8_t* pixel(std::size_t x, std::size_t y) { return &data[(y * width + x) * 3]; }
    const std::uint8_t* pixel(std::size_t x, std::size_t y) const { return &data[(y * width + x) * 3]; }
};

// Full-range BT.601 (JPEG/JFIF convention): Y in [0,255], Cb/Cr centered at 128.
inline void rgb_to_ycbcr(double r, double g, double b, double& y, double& cb, double& cr) {
    y = 0.299 * r + 0.587 * g + 0.114 * b;
    cb = 128.0 - 0.168735892 * r - 0.331264108 * g + 0.5 * b;
    cr = 128.0 + 0.5 * r - 0.418687589 * g - 0.081312411 * b;
}

inline void ycbcr_to_rgb(double y, double cb, double cr, double& r, double& g, double& b) {
    r = y + 1.402 * (cr - 128.0);
    g = y - 0.344136286 * (cb - 128.0) - 0.714136286 * (cr - 128.0);
    b = y + 1.772 * (cb - 128.0);
}

inline double clamp255(double v) { return std::min(255.0, std::max(0.0, v)); }

// RGB image -> clamped full-range BT.601 planes.
inline YCbCrImage rgb_image_to_ycbcr(const RgbImage& img) {
    YCbCrImage out;
    out.y = ImagePlane(img.width, img.height);
    out.cb = ImagePlane(img.width, img.height);
    out.cr = ImagePlane(img.width, img.height);
    for (std::size_t i = 0, n = img.width * img.height; i < n; ++i) {
        double y, cb, cr;
        rgb_to_ycbcr(img.data[3 * i], img.data[3 * i + 1], img.data[3 * i + 2], y, cb, cr);
        out.y.samples[i] = clamp255(y);
        out.cb.samples[i] = clamp255(cb);
        out.cr.samples[i] = clamp255(cr);
    }
    return out;
}

inline RgbImage ycbcr_to_rgb_image(const YCbCrImage& img) {
    RgbImage out(img.width(), img.height());
    for (std::size_t i = 0, n = out.width * out.height; i < n; ++i) {
        double r, g, b;
        ycbcr_to_rgb(img.y.samples[i], img.cb.samples[i], img.cr.samples[i], r, g, b);
        out.data[3 * i] = static_cast<std::uint8_t>(clamp255(std::round(r)));
        out.data[3 * i + 1] = static_cast<std::uint8_t>(clamp255(std::round(g)));
        out.data[3 * i + 2] = static_cast<std::uint8_t>(clamp255(std::round(b)));
    }
    return out;
}

// The luma plane; gray-input evaluation path.
inline ImagePlane to_grayscale(const YCbCrImage& img) { return img.y; }

// Read-only window into a plane.
struct BlockView {
    const ImagePlane* plane = nullptr;
    std::size_t x0 = 0;
    std::size_t y0 = 0;
    std::size_t side = 0;

    double at(std::size_t i, std::size_t j) const { // (row, col) within the block
        return plane->at(x0 + j, y0 + i);
    }

    std::vector<double> to_matrix() const {
        std::vector<double> m(side * side);
        for (std::size_t i = 0; i < side; ++i)
            for (std::size_t j = 0; j < side; ++j) m[i * side + j] = at(i, j);
        return m;
    }
};

// Row-major enumeration of block windows, top-left anchored; partial blocks at
// the right/bottom edges are discarded.
inline std::vector<BlockView> partition_blocks(const ImagePlane& plane, std::size_t block,
                                               std::size_t stride) {
    std::vector<BlockView> out;
    if (block < 2 || stride < 1) throw Error("partition_blocks: block >= 2 and stride >= 1 required");
    if (plane.width < block || plane.height < block) return out;
    const std::size_t nx = (plane.width - block) / stride + 1;
    const std::size_t ny = (plane.height - block) / stride + 1;
    out.reserve(nx * ny);
    for (std::size_t by = 0; by < ny; ++by)
        for (std::size_t bx = 0; bx < nx; ++bx)
            out.push_back(BlockView{&plane, bx * stride, by * stride, block});
    return out;
}

} // namespace forens
