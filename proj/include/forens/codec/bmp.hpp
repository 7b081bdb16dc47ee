#pragma once

// BMP reader: uncompressed BI_RGB, 8 (palette), 24 or 32 bits per pixel,
// BITMAPINFOHEADER or later, bottom-up or top-down rows.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "forens/errors.hpp"
#include "forens/image.hpp"

namespace forens {
namespace bmp {

inline bool looks_like_bmp(const std::uint8_t* data, std::size_t size) {
    return size >= 2 && data[0] == 'B' && data[1] == 'M';
}

namespace detail {

inline std::uint32_t le32(const std::uint8_t* p) {
    return p[0] | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}
inline std::uint16_t le16(const std::uint8_t* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

} // namespace detail

inline RgbImage decode(const std::uint8_t* data, std::size_t size) {
    using namespace detail;
    if (!looks_like_bmp(data, size)) throw UnsupportedFormat("not a BMP stream");
    if (size < 54) throw CorruptStream("BMP: header truncated");

    const std::uint32_t data_offset = le32(data + 10);
    const std::uint32_t dib_size = le32(data + 14);
    if (dib_size < 40) throw UnsupportedFormat("BMP: pre-BITMAPINFOHEADER files not supported");

    const std::int32_t w = static_cast<std::int32_t>(le32(data + 18));
    const std::int32_t h = static_cast<std::int32_t>(le32(data + 22));
    const std::uint16_t bpp = le16(data + 28);
    const std::uint32_t compression = le32(data + 30);
    if (compression != 0) throw UnsupportedFormat("BMP: compressed bitmaps not supported");
    if (bpp != 8 && bpp != 24 && bpp != 32)
        throw UnsupportedFormat("BMP: only 8/24/32 bpp supported");
    if (w <= 0 || h == 0) throw CorruptStream("BMP: bad dimensions");

    const bool top_down = h < 0;
    const std::size_t width = static_cast<std::size_t>(w);
    const std::size_t height = static_cast<std::size_t>(top_down ? -h : h);

    std::vector<std::uint8_t> palette; // bgra quads
    if (bpp == 8) {
        std::uint32_t colors = le32(data + 46);
        if (colors == 0) colors = 256;
        const std::size_t pal_off = 14 + dib_size;
        if (pal_off + colors * 4 > size) throw CorruptStream("BMP: palette truncated");
        palette.assign(data + pal_off, data + pal_off + colors * 4);
    }

    const std::size_t bytes_per_px = bpp / 8;
    const std::size_t stride = (width * bytes_per_px + 3) & ~std::size_t{3};
    if (data_offset + stride * height > size) throw CorruptStream("BMP: pixel data truncated");

    RgbImage out(width, height);
    for (std::size_t row = 0; row < height; ++row) {
        const std::size_t src_row = top_down ? row : height - 1 - row;
        const std::uint8_t* src = data + data_offset + src_row * stride;
        for (std::size_t x = 0; x < width; ++x) {
            std::uint8_t r, g, b;
            if (bpp == 8) {
                const std::size_t idx = static_cast<std::size_t>(src[x]) * 4;
                if (idx + 2 >= palette.size())
                    throw CorruptStream("BMP: palette index out of range");
                b = palette[idx];
                g = palette[idx + 1];
                r = palette[idx + 2];
            } else {
                const std::uint8_t* px = src + x * bytes_per_px;
                b = px[0];
                g = px[1];
                r = px[2];
            }
            std::uint8_t* dst = out.pixel(x, row);
            dst[0] = r;
            dst[1] = g;
            dst[2] = b;
        }
    }
    return out;
}

} // namespace bmp
} // namespace forens
