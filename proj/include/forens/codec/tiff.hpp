#pragma once

// TIFF reader: uncompressed 8-bit grayscale or RGB(A), chunky planar layout,
// either byte order, strip-based. Covers the uncompressed TIFFs common in
// forensics datasets; everything else is rejected as unsupported.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "forens/errors.hpp"
#include "forens/image.hpp"

namespace forens {
namespace tiff {

inline bool looks_like_tiff(const std::uint8_t* data, std::size_t size) {
    if (size < 8) return false;
    const bool ii = data[0] == 'I' && data[1] == 'I' && data[2] == 42 && data[3] == 0;
    const bool mm = data[0] == 'M' && data[1] == 'M' && data[2] == 0 && data[3] == 42;
    return ii || mm;
}

namespace detail {

struct Reader {
    const std::uint8_t* data;
    std::size_t size;
    bool big_endian;

    std::uint16_t u16(std::size_t off) const {
        if (off + 2 > size) throw CorruptStream("TIFF: read past end");
        return big_endian ? static_cast<std::uint16_t>((data[off] << 8) | data[off + 1])
                          : static_cast<std::uint16_t>(data[off] | (data[off + 1] << 8));
    }
    std::uint32_t u32(std::size_t off) const {
        if (off + 4 > size) throw CorruptStream("TIFF: read past end");
        if (big_endian)
            return (static_cast<std::uint32_t>(data[off]) << 24) |
                   (static_cast<std::uint32_t>(data[off + 1]) << 16) |
                   (static_cast<std::uint32_t>(data[off + 2]) << 8) | data[off + 3];
        return data[off] | (static_cast<std::uint32_t>(data[off + 1]) << 8) |
               (static_cast<std::uint32_t>(data[off + 2]) << 16) |
               (static_cast<std::uint32_t>(data[off + 3]) << 24);
    }
};

struct IfdEntry {
    std::uint16_t tag = 0;
    std::uint16_t type = 0;
    std::uint32_t count = 0;
    std::size_t value_offset = 0; // offset of the inline value field itself
};

inline std::size_t type_size(std::uint16_t type) {
    switch (type) {
        case 1: return 1;  // BYTE
        case 3: return 2;  // SHORT
        case 4: return 4;  // LONG
        default: return 0;
    }
}

// Reads entry value i as an unsigned integer (SHORT or LONG or BYTE).
inline std::uint32_t entry_value(const Reader& r, const IfdEntry& e, std::uint32_t index) {
    const std::size_t ts = type_size(e.type);
    if (ts == 0) throw UnsupportedFormat("TIFF: unsupported field type");
    if (index >= e.count) throw CorruptStream("TIFF: field index out of range");
    const std::size_t total = ts * e.count;
    const std::size_t base = (total <= 4) ? e.value_offset : r.u32(e.value_offset);
    const std::size_t off = base + static_cast<std::size_t>(index) * ts;
    if (ts == 1) {
        if (off >= r.size) throw CorruptStream("TIFF: read past end");
        return r.data[off];
    }
    return ts == 2 ? r.u16(off) : r.u32(off);
}

} // namespace detail

inline RgbImage decode(const std::uint8_t* data, std::size_t size) {
    using namespace detail;
    if (!looks_like_tiff(data, size)) throw UnsupportedFormat("not a TIFF stream");
    Reader r{data, size, data[0] == 'M'};

    const std::size_t ifd_off = r.u32(4);
    const std::uint16_t n_entries = r.u16(ifd_off);
    std::vector<IfdEntry> entries;
    for (std::uint16_t i = 0; i < n_entries; ++i) {
        const std::size_t off = ifd_off + 2 + static_cast<std::size_t>(i) * 12;
        IfdEntry e;
        e.tag = r.u16(off);
        e.type = r.u16(off + 2);
        e.count = r.u32(off + 4);
        e.value_offset = off + 8;
        entries.push_back(e);
    }
    auto find = [&](std::uint16_t tag) -> const IfdEntry* {
        for (const auto& e : entries)
            if (e.tag == tag) return &e;
        return nullptr;
    };
    auto require = [&](std::uint16_t tag, const char* name) -> const IfdEntry& {
        const IfdEntry* e = find(tag);
        if (!e) throw CorruptStream(std::string("TIFF: missing tag ") + name);
        return *e;
    };

    const std::size_t width = entry_value(r, require(256, "ImageWidth"), 0);
    const std::size_t height = entry_value(r, require(257, "ImageLength"), 0);
    if (width == 0 || height == 0) throw CorruptStream("TIFF: zero dimensions");

    const IfdEntry* comp = find(259);
    if (comp && entry_value(r, *comp, 0) != 1)
        throw UnsupportedFormat("TIFF: only uncompressed data supported");
    const IfdEntry* planar = find(284);
    if (planar && entry_value(r, *planar, 0) != 1)
        throw UnsupportedFormat("TIFF: planar layout not supported");

    const IfdEntry* spp_entry = find(277);
    const std::size_t spp = spp_entry ? entry_value(r, *spp_entry, 0) : 1;
    if (spp != 1 && spp != 3 && spp != 4)
        throw UnsupportedFormat("TIFF: samples per pixel must be 1, 3 or 4");

    if (const IfdEntry* bits = find(258)) {
        for (std::uint32_t i = 0; i < bits->count; ++i)
            if (entry_value(r, *bits, i) != 8)
                throw UnsupportedFormat("TIFF: only 8 bits per sample supported");
    }

    const std::size_t photometric = entry_value(r, require(262, "PhotometricInterpretation"), 0);
    if (photometric > 2) throw UnsupportedFormat("TIFF: unsupported photometric interpretation");

    const IfdEntry& offsets = require(273, "StripOffsets");
    const IfdEntry& counts = require(279, "StripByteCounts");
    if (offsets.count != counts.count) throw CorruptStream("TIFF: strip tables disagree");

    std::vector<std::uint8_t> pixels;
    pixels.reserve(width * height * spp);
    for (std::uint32_t s = 0; s < offsets.count; ++s) {
        const std::size_t off = entry_value(r, offsets, s);
        const std::size_t len = entry_value(r, counts, s);
        if (off + len > size) throw CorruptStream("TIFF: strip overruns stream");
        pixels.insert(pixels.end(), data + off, data + off + len);
    }
    if (pixels.size() < width * height * spp) throw CorruptStream("TIFF: pixel data truncated");

    RgbImage out(width, height);
    for (std::size_t i = 0, n = width * height; i < n; ++i) {
        const std::uint8_t* px = &pixels[i * spp];
        std::uint8_t rr, gg, bb;
        if (spp == 1) {
            const std::uint8_t g = (photometric == 0) ? static_cast<std::uint8_t>(255 - px[0])
                                                      : px[0];
            rr = gg = bb = g;
        } else {
            rr = px[0];
            gg = px[1];
            bb = px[2];
        }
        out.data[3 * i] = rr;
        out.data[3 * i + 1] = gg;
        out.data[3 * i + 2] = bb;
    }
    return out;
}

} // namespace tiff
} // namespace forens
