#pragma once

#include <cstddef>
#include <cstdio>
#include <string>
#include <vector>

#include "forens/dct.hpp"
#include "forens/dwt.hpp"
#include "forens/errors.hpp"
#include "forens/feature_stats.hpp"
#include "forens/image.hpp"
#include "forens/lbp.hpp"

namespace forens {

enum class Method { ALAHMADI, DUA, ARMAN, MANDEEP, MOHAMMED };

inline constexpr Method kAllMethods[] = {Method::ALAHMADI, Method::DUA, Method::ARMAN,
                                         Method::MANDEEP, Method::MOHAMMED};

inline const char* method_name(Method m) {
    switch (m) {
        case Method::ALAHMADI: return "ALAHMADI";
        case Method::DUA: return "DUA";
        case Method::ARMAN: return "ARMAN";
        case Method::MANDEEP: return "MANDEEP";
        case Method::MOHAMMED: return "MOHAMMED";
    }
    return "?";
}

inline Method parse_method(const std::string& name) {
    for (Method m : kAllMethods)
        if (name == method_name(m)) return m;
    throw UnknownMethod("unknown method '" + name +
                        "' (valid: ALAHMADI, DUA, ARMAN, MANDEEP, MOHAMMED)");
}

inline std::size_t method_dimensionality(Method m) {
    switch (m) {
        case Method::ALAHMADI: return 512;
        case Method::DUA: return 378;
        case Method::ARMAN: return 13;
        case Method::MANDEEP: return 1024;
        case Method::MOHAMMED: return 128;
    }
    return 0;
}

struct FeatureVector {
    Method method;
    std::vector<double> values;
};

namespace detail {

// Shared tail of the Alahmadi/Mohammed pipelines: LBP code plane ->
// non-overlapping blocks -> DCT -> one aggregate per coefficient position
// (row-major (u,v) order).
enum class BlockAggregate { POPULATION_STD, MEAN };

inline std::vector<double> lbp_dct_aggregate(const ImagePlane& chroma, std::size_t block_side,
                                             std::size_t min_blocks, BlockAggregate agg,
                                             const char* who) {
    ImagePlane codes = lbp_map(chroma);
    auto views = partition_blocks(codes, block_side, block_side);
    if (views.size() < min_blocks) {
        if (agg == BlockAggregate::POPULATION_STD)
            throw PlaneTooSmall(std::string(who) + ": LBP map admits too few blocks");
        throw TooFewBlocks(std::string(who) + ": LBP map admits no full block");
    }
    const std::size_t dims = block_side * block_side;
    std::vector<double> sum(dims, 0.0), sumsq(dims, 0.0);
    for (const BlockView& v : views) {
        DctBlock d = dct2(v);
        for (std::size_t k = 0; k < dims; ++k) {
            sum[k] += d.coeffs[k];
            sumsq[k] += d.coeffs[k] * d.coeffs[k];
        }
    }
    const double n = static_cast<double>(views.size());
    std::vector<double> out(dims);
    for (std::size_t k = 0; k < dims; ++k) {
        const double mean = sum[k] / n;
        if (agg == BlockAggregate::MEAN) {
            out[k] = mean;
        } else {
            double var = sumsq[k] / n - mean * mean;
            if (var < 0.0) var = 0.0;
            out[k] = std::sqrt(var);
        }
    }
    return out;
}

inline std::vector<DctBlock> plane_dct_blocks(const ImagePlane& plane, const char* who) {
    auto views = partition_blocks(plane, 8, 8);
    if (views.empty()) throw TooFewBlocks(std::string(who) + ": plane admits no full 8x8 block");
    std::vector<DctBlock> blocks;
    blocks.reserve(views.size());
    for (const BlockView& v : views) blocks.push_back(dct2(v));
    return blocks;
}

} // namespace detail

// LBP texture of the chroma planes in the 16x16 block-DCT domain; the feature
// is the per-position spread of the block spectra. 512 dims (cb then cr).
inline FeatureVector extract_alahmadi(const YCbCrImage& img) {
    std::vector<double> values;
    values.reserve(512);
    for (const ImagePlane* plane : {&img.cb, &img.cr}) {
        auto part = detail::lbp_dct_aggregate(*plane, 16, 2, detail::BlockAggregate::POPULATION_STD,
                                              "extract_alahmadi");
        values.insert(values.end(), part.begin(), part.end());
    }
    return FeatureVector{Method::ALAHMADI, std::move(values)};
}

// JPEG-artifact statistics: per plane (y, cb, cr), 8x8 block DCT, then the 63
// AC standard deviations and 63 ones-fractions in zig-zag order. 378 dims.
inline FeatureVector extract_dua(const YCbCrImage& img) {
    std::vector<double> values;
    values.reserve(378);
    for (const ImagePlane* plane : {&img.y, &img.cb, &img.cr}) {
        auto blocks = detail::plane_dct_blocks(*plane, "extract_dua");
        if (blocks.size() < 2) throw TooFewBlocks("extract_dua: need at least 2 blocks per plane");
        AcStatistics st = ac_statistics(blocks);
        values.insert(values.end(), st.std_dev.begin(), st.std_dev.end());
        values.insert(values.end(), st.ones.begin(), st.ones.end());
    }
    return FeatureVector{Method::DUA, std::move(values)};
}

// Benford-style mantissa statistics of the luma block-DCT AC coefficients.
// 13 dims: 9 first-digit bins + 4 mantissa moments.
inline FeatureVector extract_arman(const YCbCrImage& img) {
    auto blocks = detail::plane_dct_blocks(img.y, "extract_arman");
    auto feats = mantissa_features(blocks);
    return FeatureVector{Method::ARMAN, std::vector<double>(feats.begin(), feats.end())};
}

// One-level Haar decomposition of the luma plane; each band is summarized by
// the normalized histogram of its LBP codes. 1024 dims (ll, lh, hl, hh).
inline FeatureVector extract_mandeep(const YCbCrImage& img) {
    ImagePlane gray = to_grayscale(img);
    if (gray.width < 8 || gray.height < 8)
        throw PlaneTooSmall("extract_mandeep: image must be at least 8x8");
    DwtBands bands = haar_dwt1(gray);
    std::vector<double> values;
    values.reserve(1024);
    for (const ImagePlane* band : {&bands.ll, &bands.lh, &bands.hl, &bands.hh}) {
        auto hist = lbp_histogram(lbp_map(*band));
        values.insert(values.end(), hist.begin(), hist.end());
    }
    return FeatureVector{Method::MANDEEP, std::move(values)};
}

// Mean summary statistic of the chroma LBP spectra: per chroma plane, LBP map,
// 8x8 block DCT, per-position mean across blocks. 128 dims (cb then cr).
inline FeatureVector extract_mohammed(const YCbCrImage& img) {
    std::vector<double> values;
    values.reserve(128);
    for (const ImagePlane* plane : {&img.cb, &img.cr}) {
        auto part = detail::lbp_dct_aggregate(*plane, 8, 1, detail::BlockAggregate::MEAN,
                                              "extract_mohammed");
        values.insert(values.end(), part.begin(), part.end());
    }
    return FeatureVector{Method::MOHAMMED, std::move(values)};
}

inline FeatureVector extract_features(Method m, const YCbCrImage& img) {
    switch (m) {
        case Method::ALAHMADI: return extract_alahmadi(img);
        case Method::DUA: return extract_dua(img);
        case Method::ARMAN: return extract_arman(img);
        case Method::MANDEEP: return extract_mandeep(img);
        case Method::MOHAMMED: return extract_mohammed(img);
    }
    throw UnknownMethod("extract_features: bad method id");
}

// One feature record per line: method,image_id,label,v0,v1,...
// Values are printed at 9 significant digits.
inline std::string format_feature_record(const FeatureVector& fv, const std::string& image_id,
                                         const std::string& label) {
    std::string line = std::string(method_name(fv.method)) + "," + image_id + "," + label;
    char buf[40];
    for (double v : fv.values) {
        std::snprintf(buf, sizeof(buf), ",%.9g", v);
        line += buf;
    }
    return line;
}

struct FeatureRecord {
    Method method;
    std::string image_id;
    std::string label;
    std::vector<double> values;
};

inline FeatureRecord parse_feature_record(const std::string& line) {
    FeatureRecord rec;
    std::size_t pos = 0;
    auto next_field = [&](const char* what) {
        std::size_t comma = line.find(',', pos);
        if (comma == std::string::npos)
            throw ParseError(std::string("feature record missing field: ") + what);
        std::string f = line.substr(pos, comma - pos);
        pos = comma + 1;
        return f;
    };
    rec.method = parse_method(next_field("method"));
    rec.image_id = next_field("image_id");
    rec.label = next_field("label");
    while (pos <= line.size()) {
        std::size_t comma = line.find(',', pos);
        std::string f = (comma == std::string::npos) ? line.substr(pos)
                                                     : line.substr(pos, comma - pos);
        rec.values.push_back(std::stod(f));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return rec;
}

} // namespace forens
