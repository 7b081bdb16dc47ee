#pragma once

// PNG reader: 8-bit depth, color types 0/2/3/4/6, non-interlaced.
// Alpha channels are dropped. CRCs are not verified; structural damage and
// inflate failures surface as CorruptStream.

#include <cstddef>
#include <cstdint>
#include <cstring>
#include <vector>

#include <zlib.h>

#include "forens/errors.hpp"
#include "forens/image.hpp"

namespace forens {
namespace png {

inline constexpr std::uint8_t kSignature[8] = {137, 80, 78, 71, 13, 10, 26, 10};

inline bool looks_like_png(const std::uint8_t* data, std::size_t size) {
    return size >= 8 && std::memcmp(data, kSignature, 8) == 0;
}

namespace detail {

inline std::uint32_t be32(const std::uint8_t* p) {
    return (static_cast<std::uint32_t>(p[0]) << 24) | (static_cast<std::uint32_t>(p[1]) << 16) |
           (static_cast<std::uint32_t>(p[2]) << 8) | p[3];
}

inline std::uint8_t paeth(int a, int b, int c) {
    const int p = a + b - c;
    const int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
    if (pa <= pb && pa <= pc) return static_cast<std::uint8_t>(a);
    if (pb <= pc) return static_cast<std::uint8_t>(b);
    return static_cast<std::uint8_t>(c);
}

inline std::vector<std::uint8_t> inflate_all(const std::vector<std::uint8_t>& in,
                                             std::size_t expected) {
    std::vector<std::uint8_t> out(expected);
    z_stream zs{};
    if (inflateInit(&zs) != Z_OK) throw Error("zlib init failed");
    zs.next_in = const_cast<Bytef*>(in.data());
    zs.avail_in = static_cast<uInt>(in.size());
    zs.next_out = out.data();
    zs.avail_out = static_cast<uInt>(out.size());
    const int rc = inflate(&zs, Z_FINISH);
    inflateEnd(&zs);
    if (rc != Z_STREAM_END || zs.avail_out != 0)
        throw CorruptStream("PNG: inflate failed or pixel data truncated");
    return out;
}

} // namespace detail

inline RgbImage decode(const std::uint8_t* data, std::size_t size) {
    using namespace detail;
    if (!looks_like_png(data, size)) throw UnsupportedFormat("not a PNG stream");

    std::size_t pos = 8;
    std::uint32_t width = 0, height = 0;
    int bit_depth = 0, color_type = -1;
    std::vector<std::uint8_t> idat;
    std::vector<std::uint8_t> palette; // rgb triplets
    bool saw_ihdr = false, saw_iend = false;

    while (pos + 8 <= size) {
        const std::uint32_t len = be32(data + pos);
        char type[5] = {0};
        std::memcpy(type, data + pos + 4, 4);
        pos += 8;
        if (pos + len + 4 > size) throw CorruptStream("PNG: chunk overruns stream");
        const std::uint8_t* chunk = data + pos;

        if (std::strcmp(type, "IHDR") == 0) {
            if (len != 13) throw CorruptStream("PNG: bad IHDR length");
            width = be32(chunk);
            height = be32(chunk + 4);
            bit_depth = chunk[8];
            color_type = chunk[9];
            if (chunk[10] != 0 || chunk[11] != 0) throw CorruptStream("PNG: bad IHDR methods");
            if (chunk[12] != 0) throw UnsupportedFormat("PNG: interlaced images not supported");
            if (bit_depth != 8) throw UnsupportedFormat("PNG: only 8-bit depth supported");
            if (color_type != 0 && color_type != 2 && color_type != 3 && color_type != 4 &&
                color_type != 6)
                throw UnsupportedFormat("PNG: unsupported color type");
            if (width == 0 || height == 0) throw CorruptStream("PNG: zero dimensions");
            saw_ihdr = true;
        } else if (std::strcmp(type, "PLTE") == 0) {
            palette.assign(chunk, chunk + len);
        } else if (std::strcmp(type, "IDAT") == 0) {
            idat.insert(idat.end(), chunk, chunk + len);
        } else if (std::strcmp(type, "IEND") == 0) {
            saw_iend = true;
            break;
        }
        pos += len + 4; // skip data + crc
    }
    if (!saw_ihdr) throw CorruptStream("PNG: missing IHDR");
    if (!saw_iend) throw CorruptStream("PNG: missing IEND");
    if (idat.empty()) throw CorruptStream("PNG: no IDAT data");

    const std::size_t channels =
        (color_type == 0 || color_type == 3) ? 1 : (color_type == 4 ? 2 : (color_type == 2 ? 3 : 4));
    const std::size_t row_bytes = static_cast<std::size_t>(width) * channels;
    const std::size_t raw_size = (row_bytes + 1) * height;
    std::vector<std::uint8_t> raw = inflate_all(idat, raw_size);

    // unfilter in place, scanline by scanline
    std::vector<std::uint8_t> pixels(row_bytes * height);
    const std::size_t bpp = channels;
    for (std::size_t y = 0; y < height; ++y) {
        const std::uint8_t filter = raw[y * (row_bytes + 1)];
        const std::uint8_t* src = &raw[y * (row_bytes + 1) + 1];
        std::uint8_t* dst = &pixels[y * row_bytes];
        const std::uint8_t* above = (y > 0) ? &pixels[(y - 1) * row_bytes] : nullptr;
        for (std::size_t x = 0; x < row_bytes; ++x) {
            const int a = (x >= bpp) ? dst[x - bpp] : 0;
            const int b = above ? above[x] : 0;
            const int c = (above && x >= bpp) ? above[x - bpp] : 0;
            int v = src[x];
            switch (filter) {
                case 0: break;
                case 1: v += a; break;
                case 2: v += b; break;
                case 3: v += (a + b) / 2; break;
                case 4: v += paeth(a, b, c); break;
                default: throw CorruptStream("PNG: unknown filter type");
            }
            dst[x] = static_cast<std::uint8_t>(v & 0xff);
        }
    }

    RgbImage out(width, height);
    for (std::size_t i = 0, n = static_cast<std::size_t>(width) * height; i < n; ++i) {
        const std::uint8_t* px = &pixels[i * channels];
        std::uint8_t r, g, b;
        if (color_type == 2 || color_type == 6) {
            r = px[0];
            g = px[1];
            b = px[2];
        } else if (color_type == 3) {
            const std::size_t idx = static_cast<std::size_t>(px[0]) * 3;
            if (idx + 2 >= palette.size()) throw CorruptStream("PNG: palette index out of range");
            r = palette[idx];
            g = palette[idx + 1];
            b = palette[idx + 2];
        } else { // 0 or 4: grayscale
            r = g = b = px[0];
        }
        out.data[3 * i] = r;
        out.data[3 * i + 1] = g;
        out.data[3 * i + 2] = b;
    }
    return out;
}

} // namespace png
} // namespace forens
