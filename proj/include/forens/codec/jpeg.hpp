#pragma once

// Baseline JPEG codec (ITU-T T.81 sequential DCT, Huffman coding).
// The encoder always writes 4:4:4 with the Annex K quantization tables scaled
// by the usual IJG quality mapping and the Annex K Huffman tables, so corpus
// bytes are identical across platforms. The decoder handles baseline and
// extended-sequential Huffman streams (grayscale or YCbCr, sampling factors
// up to 4, restart markers); progressive and arithmetic streams are rejected.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "forens/dct.hpp"
#include "forens/errors.hpp"
#include "forens/image.hpp"

namespace forens {
namespace jpeg {

// Annex K quantization tables, row-major natural order.
inline constexpr std::array<int, 64> kLumaQuantBase = {
    16, 11, 10, 16, 24,  40,  51,  61,  //
    12, 12, 14, 19, 26,  58,  60,  55,  //
    14, 13, 16, 24, 40,  57,  69,  56,  //
    14, 17, 22, 29, 51,  87,  80,  62,  //
    18, 22, 37, 56, 68,  109, 103, 77,  //
    24, 35, 55, 64, 81,  104, 113, 92,  //
    49, 64, 78, 87, 103, 121, 120, 101, //
    72, 92, 95, 98, 112, 100, 103, 99};

inline constexpr std::array<int, 64> kChromaQuantBase = {
    17, 18, 24, 47, 99, 99, 99, 99, //
    18, 21, 26, 66, 99, 99, 99, 99, //
    24, 26, 56, 99, 99, 99, 99, 99, //
    47, 66, 99, 99, 99, 99, 99, 99, //
    99, 99, 99, 99, 99, 99, 99, 99, //
    99, 99, 99, 99, 99, 99, 99, 99, //
    99, 99, 99, 99, 99, 99, 99, 99, //
    99, 99, 99, 99, 99, 99, 99, 99};

// IJG quality scaling; entries clamped to [1, 255].
inline std::array<std::uint16_t, 64> scaled_quant_table(const std::array<int, 64>& base,
                                                        int quality) {
    if (quality < 1) quality = 1;
    if (quality > 100) quality = 100;
    const int scale = (quality < 50) ? 5000 / quality : 200 - 2 * quality;
    std::array<std::uint16_t, 64> out{};
    for (std::size_t i = 0; i < 64; ++i) {
        int v = (base[i] * scale + 50) / 100;
        if (v < 1) v = 1;
        if (v > 255) v = 255;
        out[i] = static_cast<std::uint16_t>(v);
    }
    return out;
}

// Annex K Huffman table definitions: counts per code length 1..16, then the
// symbol list in code order.
struct HuffSpec {
    const std::uint8_t* counts; // 16 entries
    const std::uint8_t* symbols;
    std::size_t n_symbols;
};

namespace tables {

inline constexpr std::uint8_t kDcLumaCounts[16] = {0, 1, 5, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0};
inline constexpr std::uint8_t kDcSymbols[12] = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11};
inline constexpr std::uint8_t kDcChromaCounts[16] = {0, 3, 1, 1, 1, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0};

inline constexpr std::uint8_t kAcLumaCounts[16] = {0, 2, 1, 3, 3, 2, 4, 3, 5, 5, 4, 4, 0, 0, 1, 0x7d};
inline constexpr std::uint8_t kAcLumaSymbols[162] = {
    0x01, 0x02, 0x03, 0x00, 0x04, 0x11, 0x05, 0x12, 0x21, 0x31, 0x41, 0x06, 0x13, 0x51, 0x61, 0x07,
    0x22, 0x71, 0x14, 0x32, 0x81, 0x91, 0xa1, 0x08, 0x23, 0x42, 0xb1, 0xc1, 0x15, 0x52, 0xd1, 0xf0,
    0x24, 0x33, 0x62, 0x72, 0x82, 0x09, 0x0a, 0x16, 0x17, 0x18, 0x19, 0x1a, 0x25, 0x26, 0x27, 0x28,
    0x29, 0x2a, 0x34, 0x35, 0x36, 0x37, 0x38, 0x39, 0x3a, 0x43, 0x44, 0x45, 0x46, 0x47, 0x48, 0x49,
    0x4a, 0x53, 0x54, 0x55, 0x56, 0x57, 0x58, 0x59, 0x5a, 0x63, 0x64, 0x65, 0x66, 0x67, 0x68, 0x69,
    0x6a, 0x73, 0x74, 0x75, 0x76, 0x77, 0x78, 0x79, 0x7a, 0x83, 0x84, 0x85, 0x86, 0x87, 0x88, 0x89,
    0x8a, 0x92, 0x93, 0x94, 0x95, 0x96, 0x97, 0x98, 0x99, 0x9a, 0xa2, 0xa3, 0xa4, 0xa5, 0xa6, 0xa7,
    0xa8, 0xa9, 0xaa, 0xb2, 0xb3, 0xb4, 0xb5, 0xb6, 0xb7, 0xb8, 0xb9, 0xba, 0xc2, 0xc3, 0xc4, 0xc5,
    0xc6, 0xc7, 0xc8, 0xc9, 0xca, 0xd2, 0xd3, 0xd4, 0xd5, 0xd6, 0xd7, 0xd8, 0xd9, 0xda, 0xe1, 0xe2,
    0xe3, 0xe4, 0xe5, 0xe6, 0xe7, 0xe8, 0xe9, 0xea, 0xf1, 0xf2, 0xf3, 0xf4, 0xf5, 0xf6, 0xf7, 0xf8,
    0xf9, 0xfa};

inline constexpr std::uint8_t kAcChromaCounts[16] = {0, 2, 1, 2, 4, 4, 3, 4, 7, 5, 4, 4, 0, 1, 2, 0x77};
inline constexpr std::uint8_t kAcChromaSymbols[162] = {
    0x00, 0x01, 0x02, 0x03, 0x11, 0x04, 0x05, 0x21, 0x31, 0x06, 0x12, 0x41, 0x51, 0x07, 0x61, 0x71,
    0x13, 0x22, 0x32, 0x81, 0x08, 0x14, 0x42, 0x91, 0xa1, 0xb1, 0xc1, 0x09, 0x23, 0x33, 0x52, 0xf0,
    0x15, 0x62, 0x72, 0xd1, 0x0a, 0x16, 0x24, 0x34, 0xe1, 0x25, 0xf1, 0x17, 0x18, 0x19, 0x1a, 0x26,
    0x27, 0x28, 0x29, 0x2a, 0x35, 0x36, 0x37, 0x38, 0x39, 0x3a, 0x43, 0x44, 0x45, 0x46, 0x47, 0x48,
    0x49, 0x4a, 0x53, 0x54, 0x55, 0x56, 0x57, 0x58, 0x59, 0x5a, 0x63, 0x64, 0x65, 0x66, 0x67, 0x68,
    0x69, 0x6a, 0x73, 0x74, 0x75, 0x76, 0x77, 0x78, 0x79, 0x7a, 0x82, 0x83, 0x84, 0x85, 0x86, 0x87,
    0x88, 0x89, 0x8a, 0x92, 0x93, 0x94, 0x95, 0x96, 0x97, 0x98, 0x99, 0x9a, 0xa2, 0xa3, 0xa4, 0xa5,
    0xa6, 0xa7, 0xa8, 0xa9, 0xaa, 0xb2, 0xb3, 0xb4, 0xb5, 0xb6, 0xb7, 0xb8, 0xb9, 0xba, 0xc2, 0xc3,
    0xc4, 0xc5, 0xc6, 0xc7, 0xc8, 0xc9, 0xca, 0xd2, 0xd3, 0xd4, 0xd5, 0xd6, 0xd7, 0xd8, 0xd9, 0xda,
    0xe2, 0xe3, 0xe4, 0xe5, 0xe6, 0xe7, 0xe8, 0xe9, 0xea, 0xf2, 0xf3, 0xf4, 0xf5, 0xf6, 0xf7, 0xf8,
    0xf9, 0xfa};

inline HuffSpec dc_luma() { return {kDcLumaCounts, kDcSymbols, 12}; }
inline HuffSpec dc_chroma() { return {kDcChromaCounts, kDcSymbols, 12}; }
inline HuffSpec ac_luma() { return {kAcLumaCounts, kAcLumaSymbols, 162}; }
inline HuffSpec ac_chroma() { return {kAcChromaCounts, kAcChromaSymbols, 162}; }

} // namespace tables

inline const std::array<std::uint8_t, 64>& zigzag_flat() {
    // flat index into the natural-order block for each zig-zag position
    static const std::array<std::uint8_t, 64> z = [] {
        std::array<std::uint8_t, 64> out{};
        auto order = zigzag_order(8);
        for (std::size_t k = 0; k < 64; ++k)
            out[k] = static_cast<std::uint8_t>(order[k].first * 8 + order[k].second);
        return out;
    }();
    return z;
}

// ---------------------------------------------------------------------------
// Encoder
// ---------------------------------------------------------------------------

namespace detail {

struct BitWriter {
    std::vector<std::uint8_t>& out;
    std::uint32_t buffer = 0;
    int bit_count = 0;

    void put(std::uint32_t bits, int count) {
        buffer = (buffer << count) | (bits & ((1u << count) - 1u));
        bit_count += count;
        while (bit_count >= 8) {
            const std::uint8_t byte = static_cast<std::uint8_t>((buffer >> (bit_count - 8)) & 0xff);
            out.push_back(byte);
            if (byte == 0xff) out.push_back(0x00); // byte stuffing
            bit_count -= 8;
        }
    }

    void flush() {
        if (bit_count > 0) put(0x7f, 8 - bit_count); // pad with 1s
    }
};

struct HuffEncoder {
    std::array<std::uint16_t, 256> code{};
    std::array<std::uint8_t, 256> length{};

    explicit HuffEncoder(const HuffSpec& spec) {
        std::uint16_t next = 0;
        std::size_t k = 0;
        for (int len = 1; len <= 16; ++len) {
            for (int i = 0; i < spec.counts[len - 1]; ++i) {
                const std::uint8_t sym = spec.symbols[k++];
                code[sym] = next++;
                length[sym] = static_cast<std::uint8_t>(len);
            }
            next = static_cast<std::uint16_t>(next << 1);
        }
    }
};

inline int bit_category(int v) {
    int a = v < 0 ? -v : v;
    int n = 0;
    while (a) {
        ++n;
        a >>= 1;
    }
    return n;
}

inline void put_marker(std::vector<std::uint8_t>& out, std::uint8_t marker) {
    out.push_back(0xff);
    out.push_back(marker);
}

inline void put_segment(std::vector<std::uint8_t>& out, std::uint8_t marker,
                        const std::vector<std::uint8_t>& payload) {
    put_marker(out, marker);
    const std::size_t len = payload.size() + 2;
    out.push_back(static_cast<std::uint8_t>(len >> 8));
    out.push_back(static_cast<std::uint8_t>(len & 0xff));
    out.insert(out.end(), payload.begin(), payload.end());
}

} // namespace detail

// Encodes interleaved RGB as a baseline JFIF stream, 4:4:4 sampling.
inline std::vector<std::uint8_t> encode_rgb(const RgbImage& img, int quality) {
    using namespace detail;
    if (img.width == 0 || img.height == 0 || img.width > 65535 || img.height > 65535)
        throw Error("encode_jpeg: image dimensions out of range");

    const auto luma_q = scaled_quant_table(kLumaQuantBase, quality);
    const auto chroma_q = scaled_quant_table(kChromaQuantBase, quality);
    const auto& zz = zigzag_flat();

    std::vector<std::uint8_t> out;
    put_marker(out, 0xd8); // SOI

    { // APP0 / JFIF
        std::vector<std::uint8_t> app0 = {'J', 'F', 'I', 'F', 0, 1, 1, 0, 0, 1, 0, 1, 0, 0};
        put_segment(out, 0xe0, app0);
    }
    for (int t = 0; t < 2; ++t) { // DQT
        std::vector<std::uint8_t> dqt;
        dqt.push_back(static_cast<std::uint8_t>(t)); // Pq=0, Tq=t
        const auto& q = (t == 0) ? luma_q : chroma_q;
        for (int k = 0; k < 64; ++k) dqt.push_back(static_cast<std::uint8_t>(q[zz[k]]));
        put_segment(out, 0xdb, dqt);
    }
    { // SOF0
        std::vector<std::uint8_t> sof = {8,
                                         static_cast<std::uint8_t>(img.height >> 8),
                                         static_cast<std::uint8_t>(img.height & 0xff),
                                         static_cast<std::uint8_t>(img.width >> 8),
                                         static_cast<std::uint8_t>(img.width & 0xff),
                                         3};
        const std::uint8_t comp[3][3] = {{1, 0x11, 0}, {2, 0x11, 1}, {3, 0x11, 1}};
        for (const auto& c : comp) sof.insert(sof.end(), c, c + 3);
        put_segment(out, 0xc0, sof);
    }
    auto emit_dht = [&](std::uint8_t cls_id, const HuffSpec& spec) {
        std::vector<std::uint8_t> dht;
        dht.push_back(cls_id);
        for (int i = 0; i < 16; ++i) dht.push_back(spec.counts[i]);
        for (std::size_t i = 0; i < spec.n_symbols; ++i) dht.push_back(spec.symbols[i]);
        put_segment(out, 0xc4, dht);
    };
    emit_dht(0x00, tables::dc_luma());
    emit_dht(0x10, tables::ac_luma());
    emit_dht(0x01, tables::dc_chroma());
    emit_dht(0x11, tables::ac_chroma());
    { // SOS
        std::vector<std::uint8_t> sos = {3, 1, 0x00, 2, 0x11, 3, 0x11, 0, 63, 0};
        put_segment(out, 0xda, sos);
    }

    const HuffEncoder dc_l(tables::dc_luma()), ac_l(tables::ac_luma());
    const HuffEncoder dc_c(tables::dc_chroma()), ac_c(tables::ac_chroma());
    BitWriter bw{out};

    const std::size_t mcux = (img.width + 7) / 8;
    const std::size_t mcuy = (img.height + 7) / 8;
    int pred[3] = {0, 0, 0};
    std::vector<double> block(64);
    std::array<int, 64> quantized{};

    auto encode_block = [&](int comp, const std::array<std::uint16_t, 64>& qtbl,
                            const HuffEncoder& dc, const HuffEncoder& ac) {
        DctBlock spectrum = dct2(block, 8);
        for (int k = 0; k < 64; ++k) {
            const double q = spectrum.coeffs[zz[k]] / static_cast<double>(qtbl[zz[k]]);
            quantized[k] = static_cast<int>(std::llround(q));
        }
        const int diff = quantized[0] - pred[comp];
        pred[comp] = quantized[0];
        const int dc_size = bit_category(diff);
        bw.put(dc.code[dc_size], dc.length[dc_size]);
        if (dc_size > 0) {
            const int bits = diff >= 0 ? diff : diff + (1 << dc_size) - 1;
            bw.put(static_cast<std::uint32_t>(bits), dc_size);
        }
        int run = 0;
        for (int k = 1; k < 64; ++k) {
            if (quantized[k] == 0) {
                ++run;
                continue;
            }
            while (run > 15) {
                bw.put(ac.code[0xf0], ac.length[0xf0]); // ZRL
                run -= 16;
            }
            const int size = bit_category(quantized[k]);
            const int sym = (run << 4) | size;
            bw.put(ac.code[sym], ac.length[sym]);
            const int v = quantized[k];
            const int bits = v >= 0 ? v : v + (1 << size) - 1;
            bw.put(static_cast<std::uint32_t>(bits), size);
            run = 0;
        }
        if (run > 0) bw.put(ac.code[0x00], ac.length[0x00]); // EOB
    };

    for (std::size_t my = 0; my < mcuy; ++my) {
        for (std::size_t mx = 0; mx < mcux; ++mx) {
            for (int comp = 0; comp < 3; ++comp) {
                for (std::size_t by = 0; by < 8; ++by) {
                    for (std::size_t bx = 0; bx < 8; ++bx) {
                        // edge replication for partial blocks
                        const std::size_t px = std::min(mx * 8 + bx, img.width - 1);
                        const std::size_t py = std::min(my * 8 + by, img.height - 1);
                        const std::uint8_t* rgb = img.pixel(px, py);
                        double y, cb, cr;
                        rgb_to_ycbcr(rgb[0], rgb[1], rgb[2], y, cb, cr);
                        const double v = comp == 0 ? y : (comp == 1 ? cb : cr);
                        block[by * 8 + bx] = clamp255(v) - 128.0;
                    }
                }
                if (comp == 0)
                    encode_block(0, luma_q, dc_l, ac_l);
                else
                    encode_block(comp, chroma_q, dc_c, ac_c);
            }
        }
    }
    bw.flush();
    put_marker(out, 0xd9); // EOI
    return out;
}

// ---------------------------------------------------------------------------
// Decoder
// ---------------------------------------------------------------------------

namespace detail {

struct HuffDecoder {
    // canonical decode per T.81 F.2.2.3
    std::array<std::int32_t, 17> maxcode{};
    std::array<std::int32_t, 17> mincode{};
    std::array<std::int32_t, 17> valptr{};
    std::vector<std::uint8_t> symbols;
    bool valid = false;

    void build(const std::uint8_t counts[16], const std::uint8_t* syms, std::size_t n) {
        symbols.assign(syms, syms + n);
        std::int32_t code = 0;
        std::size_t k = 0;
        for (int len = 1; len <= 16; ++len) {
            if (counts[len - 1] == 0) {
                maxcode[len] = -1;
                mincode[len] = 0;
                valptr[len] = 0;
            } else {
                valptr[len] = static_cast<std::int32_t>(k);
                mincode[len] = code;
                code += counts[len - 1];
                k += counts[len - 1];
                maxcode[len] = code - 1;
            }
            code <<= 1;
        }
        valid = true;
    }
};

// Entropy-coded segment reader: removes stuffed zero bytes, stops at markers.
struct BitReader {
    const std::uint8_t* data;
    std::size_t size;
    std::size_t pos;
    std::uint32_t buffer = 0;
    int bit_count = 0;
    int pending_marker = -1; // marker byte seen while filling

    bool fill() {
        while (bit_count <= 24) {
            if (pending_marker >= 0) return bit_count > 0;
            if (pos >= size) return bit_count > 0;
            std::uint8_t byte = data[pos++];
            if (byte == 0xff) {
                if (pos >= size) {
                    pending_marker = 0x100; // truncated
                    return bit_count > 0;
                }
                const std::uint8_t next = data[pos];
                if (next == 0x00) {
                    ++pos; // stuffed
                } else {
                    pending_marker = next;
                    return bit_count > 0;
                }
            }
            buffer = (buffer << 8) | byte;
            bit_count += 8;
        }
        return true;
    }

    int read_bit() {
        if (bit_count == 0 && !fill())
            throw CorruptStream("JPEG entropy stream truncated");
        if (bit_count == 0) throw CorruptStream("JPEG entropy stream truncated");
        --bit_count;
        return static_cast<int>((buffer >> bit_count) & 1u);
    }

    std::int32_t read_bits(int n) {
        std::int32_t v = 0;
        for (int i = 0; i < n; ++i) v = (v << 1) | read_bit();
        return v;
    }

    void align_and_clear() {
        buffer = 0;
        bit_count = 0;
    }

    int take_marker() {
        if (pending_marker >= 0) {
            const int m = pending_marker;
            pending_marker = -1;
            if (pos < size) ++pos; // consume the marker byte after 0xff
            return m;
        }
        // marker not buffered yet: it must start at the current position
        while (pos + 1 < size && data[pos] == 0xff && data[pos + 1] == 0xff) ++pos;
        if (pos + 1 < size && data[pos] == 0xff && data[pos + 1] != 0x00) {
            const int m = data[pos + 1];
            pos += 2;
            return m;
        }
        return -1;
    }
};

inline int huff_decode(BitReader& br, const HuffDecoder& table) {
    std::int32_t code = br.read_bit();
    for (int len = 1; len <= 16; ++len) {
        if (table.maxcode[len] >= 0 && code <= table.maxcode[len]) {
            const std::int32_t idx = table.valptr[len] + code - table.mincode[len];
            if (idx < 0 || idx >= static_cast<std::int32_t>(table.symbols.size()))
                throw CorruptStream("JPEG Huffman decode out of range");
            return table.symbols[static_cast<std::size_t>(idx)];
        }
        code = (code << 1) | br.read_bit();
    }
    throw CorruptStream("JPEG Huffman code longer than 16 bits");
}

inline std::int32_t extend_receive(BitReader& br, int size) {
    if (size == 0) return 0;
    std::int32_t v = br.read_bits(size);
    if (v < (1 << (size - 1))) v += -(1 << size) + 1;
    return v;
}

struct Component {
    int id = 0;
    int h = 1, v = 1;
    int tq = 0;
    int td = 0, ta = 0;
    std::size_t blocks_w = 0, blocks_h = 0; // padded to MCU coverage
    std::vector<double> plane;              // blocks_w*8 x blocks_h*8 samples
    int pred = 0;
};

} // namespace detail

// Decodes a baseline/extended-sequential Huffman JPEG into full-range BT.601
// planes at the image resolution (chroma box-upsampled when subsampled).
inline YCbCrImage decode(const std::uint8_t* data, std::size_t size) {
    using namespace detail;
    if (size < 4 || data[0] != 0xff || data[1] != 0xd8)
        throw UnsupportedFormat("not a JPEG stream");

    std::array<std::array<std::uint16_t, 64>, 4> qtables{};
    std::array<bool, 4> qdefined{};
    std::array<HuffDecoder, 4> dc_tables, ac_tables;
    std::vector<Component> comps;
    std::size_t width = 0, height = 0;
    int restart_interval = 0;
    bool have_sof = false;

    std::size_t pos = 2;
    auto need = [&](std::size_t n) {
        if (pos + n > size) throw CorruptStream("JPEG stream truncated");
    };
    auto read_u16 = [&]() {
        need(2);
        const std::size_t v = (static_cast<std::size_t>(data[pos]) << 8) | data[pos + 1];
        pos += 2;
        return v;
    };

    const auto& zz = zigzag_flat();

    while (true) {
        // find next marker
        need(2);
        if (data[pos] != 0xff) throw CorruptStream("JPEG marker expected");
        while (pos < size && data[pos] == 0xff) ++pos;
        if (pos >= size) throw CorruptStream("JPEG stream truncated");
        const std::uint8_t marker = data[pos++];

        if (marker == 0xd9) throw CorruptStream("JPEG has no scan data"); // EOI before SOS
        if (marker == 0x01 || (marker >= 0xd0 && marker <= 0xd7)) continue; // TEM/RSTn: no payload

        const std::size_t seg_len = read_u16();
        if (seg_len < 2) throw CorruptStream("JPEG bad segment length");
        const std::size_t seg_end = pos + seg_len - 2;
        if (seg_end > size) throw CorruptStream("JPEG segment overruns stream");

        if (marker == 0xdb) { // DQT
            while (pos < seg_end) {
                need(1);
                const int pq = data[pos] >> 4, tq = data[pos] & 0x0f;
                ++pos;
                if (tq > 3 || pq > 1) throw CorruptStream("JPEG bad DQT header");
                for (int k = 0; k < 64; ++k) {
                    std::uint16_t v;
                    if (pq == 0) {
                        need(1);
                        v = data[pos++];
                    } else {
                        need(2);
                        v = static_cast<std::uint16_t>((data[pos] << 8) | data[pos + 1]);
                        pos += 2;
                    }
                    qtables[tq][zz[k]] = v;
                }
                qdefined[tq] = true;
            }
        } else if (marker == 0xc4) { // DHT
            while (pos < seg_end) {
                need(17);
                const int tc = data[pos] >> 4, th = data[pos] & 0x0f;
                ++pos;
                if (tc > 1 || th > 3) throw CorruptStream("JPEG bad DHT header");
                std::uint8_t counts[16];
                std::size_t total = 0;
                for (int i = 0; i < 16; ++i) {
                    counts[i] = data[pos + i];
                    total += counts[i];
                }
                pos += 16;
                need(total);
                (tc == 0 ? dc_tables[th] : ac_tables[th]).build(counts, data + pos, total);
                pos += total;
            }
        } else if (marker == 0xc0 || marker == 0xc1) { // SOF0/SOF1
            need(6);
            const int precision = data[pos];
            if (precision != 8) throw UnsupportedFormat("JPEG sample precision != 8");
            height = (static_cast<std::size_t>(data[pos + 1]) << 8) | data[pos + 2];
            width = (static_cast<std::size_t>(data[pos + 3]) << 8) | data[pos + 4];
            const int ncomp = data[pos + 5];
            pos += 6;
            if (width == 0 || height == 0) throw CorruptStream("JPEG zero dimensions");
            if (ncomp != 1 && ncomp != 3)
                throw UnsupportedFormat("JPEG component count not 1 or 3");
            comps.resize(static_cast<std::size_t>(ncomp));
            for (auto& c : comps) {
                need(3);
                c.id = data[pos];
                c.h = data[pos + 1] >> 4;
                c.v = data[pos + 1] & 0x0f;
                c.tq = data[pos + 2];
                pos += 3;
                if (c.h < 1 || c.h > 4 || c.v < 1 || c.v > 4 || c.tq > 3)
                    throw UnsupportedFormat("JPEG sampling factors out of range");
            }
            have_sof = true;
        } else if (marker == 0xc2) {
            throw UnsupportedFormat("progressive JPEG is not supported");
        } else if ((marker >= 0xc3 && marker <= 0xcb && marker != 0xc4 && marker != 0xc8) ||
                   (marker >= 0xcd && marker <= 0xcf)) {
            throw UnsupportedFormat("unsupported JPEG coding process");
        } else if (marker == 0xdd) { // DRI
            need(2);
            restart_interval = (data[pos] << 8) | data[pos + 1];
            pos += 2;
        } else if (marker == 0xda) { // SOS
            if (!have_sof) throw CorruptStream("JPEG SOS before SOF");
            need(1);
            const int ns = data[pos++];
            if (ns != static_cast<int>(comps.size()))
                throw UnsupportedFormat("JPEG non-interleaved scans not supported");
            for (int i = 0; i < ns; ++i) {
                need(2);
                const int cid = data[pos];
                const int tables_byte = data[pos + 1];
                pos += 2;
                bool found = false;
                for (auto& c : comps) {
                    if (c.id == cid) {
                        c.td = tables_byte >> 4;
                        c.ta = tables_byte & 0x0f;
                        found = true;
                    }
                }
                if (!found) throw CorruptStream("JPEG scan references unknown component");
            }
            need(3);
            pos += 3; // Ss, Se, AhAl: fixed for sequential
            break;    // entropy-coded data follows
        } else {
            pos = seg_end; // skip APPn/COM/unknown
        }
        pos = seg_end;
    }

    int hmax = 1, vmax = 1;
    for (const auto& c : comps) {
        hmax = std::max(hmax, c.h);
        vmax = std::max(vmax, c.v);
    }
    const std::size_t mcux = (width + static_cast<std::size_t>(8 * hmax) - 1) /
                             static_cast<std::size_t>(8 * hmax);
    const std::size_t mcuy = (height + static_cast<std::size_t>(8 * vmax) - 1) /
                             static_cast<std::size_t>(8 * vmax);
    for (auto& c : comps) {
        if (!qdefined[static_cast<std::size_t>(c.tq)])
            throw CorruptStream("JPEG component references undefined quant table");
        c.blocks_w = mcux * static_cast<std::size_t>(c.h);
        c.blocks_h = mcuy * static_cast<std::size_t>(c.v);
        c.plane.assign(c.blocks_w * 8 * c.blocks_h * 8, 0.0);
        c.pred = 0;
    }

    BitReader br{data, size, pos};
    std::vector<double> coeffs(64);

    auto decode_block = [&](Component& c, std::size_t bx, std::size_t by) {
        const HuffDecoder& dc = dc_tables[static_cast<std::size_t>(c.td)];
        const HuffDecoder& ac = ac_tables[static_cast<std::size_t>(c.ta)];
        if (!dc.valid || !ac.valid)
            throw CorruptStream("JPEG scan references undefined Huffman table");
        const auto& qtbl = qtables[static_cast<std::size_t>(c.tq)];
        std::fill(coeffs.begin(), coeffs.end(), 0.0);
        const int dc_size = huff_decode(br, dc);
        if (dc_size > 15) throw CorruptStream("JPEG bad DC size");
        c.pred += extend_receive(br, dc_size);
        coeffs[0] = static_cast<double>(c.pred) * qtbl[0];
        for (int k = 1; k < 64;) {
            const int rs = huff_decode(br, ac);
            const int run = rs >> 4, sz = rs & 0x0f;
            if (sz == 0) {
                if (run == 15) {
                    k += 16;
                    continue;
                }
                break; // EOB
            }
            k += run;
            if (k > 63) throw CorruptStream("JPEG AC index overrun");
            const std::int32_t v = extend_receive(br, sz);
            coeffs[zz[k]] = static_cast<double>(v) * qtbl[zz[k]];
            ++k;
        }
        const std::vector<double> spatial = idct2(DctBlock{8, coeffs});
        const std::size_t x0 = bx * 8, y0 = by * 8;
        const std::size_t row_stride = c.blocks_w * 8;
        for (std::size_t yy = 0; yy < 8; ++yy)
            for (std::size_t xx = 0; xx < 8; ++xx) {
                const double s = std::round(spatial[yy * 8 + xx] + 128.0);
                c.plane[(y0 + yy) * row_stride + (x0 + xx)] = std::min(255.0, std::max(0.0, s));
            }
    };

    const std::size_t total_mcus = mcux * mcuy;
    std::size_t mcu_index = 0;
    for (std::size_t my = 0; my < mcuy; ++my) {
        for (std::size_t mx = 0; mx < mcux; ++mx) {
            for (auto& c : comps)
                for (int vy = 0; vy < c.v; ++vy)
                    for (int hx = 0; hx < c.h; ++hx)
                        decode_block(c, mx * static_cast<std::size_t>(c.h) +
                                            static_cast<std::size_t>(hx),
                                     my * static_cast<std::size_t>(c.v) +
                                         static_cast<std::size_t>(vy));
            ++mcu_index;
            if (restart_interval > 0 && mcu_index % static_cast<std::size_t>(restart_interval) == 0 &&
                mcu_index < total_mcus) {
                br.align_and_clear();
                const int m = br.take_marker();
                if (m < 0xd0 || m > 0xd7) throw CorruptStream("JPEG missing restart marker");
                for (auto& c : comps) c.pred = 0;
            }
        }
    }

    // assemble output planes at image resolution
    YCbCrImage out;
    out.y = ImagePlane(width, height);
    out.cb = ImagePlane(width, height, 128.0);
    out.cr = ImagePlane(width, height, 128.0);
    ImagePlane* targets[3] = {&out.y, &out.cb, &out.cr};
    for (std::size_t ci = 0; ci < comps.size(); ++ci) {
        const Component& c = comps[ci];
        const std::size_t row_stride = c.blocks_w * 8;
        ImagePlane& dst = *targets[ci];
        for (std::size_t y = 0; y < height; ++y) {
            const std::size_t sy = y * static_cast<std::size_t>(c.v) /
                                   static_cast<std::size_t>(vmax);
            for (std::size_t x = 0; x < width; ++x) {
                const std::size_t sx = x * static_cast<std::size_t>(c.h) /
                                       static_cast<std::size_t>(hmax);
                dst.at(x, y) = c.plane[sy * row_stride + sx];
            }
        }
    }
    return out;
}

inline YCbCrImage decode(const std::vector<std::uint8_t>& bytes) {
    return decode(bytes.data(), bytes.size());
}

} // namespace jpeg
} // namespace forens
