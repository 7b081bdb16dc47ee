#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <vector>

#include "forens/codec/bmp.hpp"
#include "forens/codec/jpeg.hpp"
#include "forens/codec/png.hpp"
#include "forens/codec/tiff.hpp"
#include "forens/errors.hpp"
#include "forens/image.hpp"

namespace forens {

inline std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FileNotFound("cannot open file: " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return bytes;
}

inline void write_file_bytes(const std::filesystem::path& path,
                             const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write file: " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
}

enum class ImageFormat { JPEG, PNG, BMP, TIFF };

inline ImageFormat sniff_format(const std::uint8_t* data, std::size_t size) {
    if (size >= 2 && data[0] == 0xff && data[1] == 0xd8) return ImageFormat::JPEG;
    if (png::looks_like_png(data, size)) return ImageFormat::PNG;
    if (bmp::looks_like_bmp(data, size)) return ImageFormat::BMP;
    if (tiff::looks_like_tiff(data, size)) return ImageFormat::TIFF;
    throw UnsupportedFormat("unrecognized image container");
}

// Decode to full-range BT.601 planes. JPEG planes come straight from the
// bitstream (that is already the JPEG color space); RGB containers go through
// the forward transform. Grayscale sources end up with constant 128 chroma.
inline YCbCrImage decode_image(const std::uint8_t* data, std::size_t size) {
    switch (sniff_format(data, size)) {
        case ImageFormat::JPEG: return jpeg::decode(data, size);
        case ImageFormat::PNG: return rgb_image_to_ycbcr(png::decode(data, size));
        case ImageFormat::BMP: return rgb_image_to_ycbcr(bmp::decode(data, size));
        case ImageFormat::TIFF: return rgb_image_to_ycbcr(tiff::decode(data, size));
    }
    throw UnsupportedFormat("unrecognized image container");
}

inline YCbCrImage load_image(const std::filesystem::path& path) {
    const auto bytes = read_file_bytes(path);
    return decode_image(bytes.data(), bytes.size());
}

// RGB view of any supported container (JPEG output converted back; lossy by
// the usual rounding).
inline RgbImage decode_image_rgb(const std::uint8_t* data, std::size_t size) {
    switch (sniff_format(data, size)) {
        case ImageFormat::JPEG: return ycbcr_to_rgb_image(jpeg::decode(data, size));
        case ImageFormat::PNG: return png::decode(data, size);
        case ImageFormat::BMP: return bmp::decode(data, size);
        case ImageFormat::TIFF: return tiff::decode(data, size);
    }
    throw UnsupportedFormat("unrecognized image container");
}

inline RgbImage load_image_rgb(const std::filesystem::path& path) {
    const auto bytes = read_file_bytes(path);
    return decode_image_rgb(bytes.data(), bytes.size());
}

} // namespace forens
