#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "forens/codec/jpeg.hpp"
#include "forens/errors.hpp"
#include "forens/image.hpp"
#include "forens/imgio.hpp"
#include "forens/manifest.hpp"
#include "forens/rng.hpp"

namespace forens {
namespace synth {

struct Rect {
    std::size_t x = 0, y = 0, w = 0, h = 0;

    bool inside(std::size_t img_w, std::size_t img_h) const {
        return w > 0 && h > 0 && x + w <= img_w && y + h <= img_h;
    }
    bool intersects(const Rect& o) const {
        return x < o.x + o.w && o.x < x + w && y < o.y + o.h && o.y < y + h;
    }
};

enum class ForgeryKind { COPY_MOVE, SPLICE };
enum class PostProcess { NONE, JPEG_REQUANT };

struct ForgeryRecipe {
    ForgeryKind kind = ForgeryKind::COPY_MOVE;
    Rect region;                       // source rectangle (in donor for SPLICE)
    std::size_t dest_x = 0, dest_y = 0;
    std::size_t donor_index = 0;       // SPLICE only
    PostProcess post = PostProcess::NONE;
    int quality_donor = 0;             // q1: pasted content passes through this
    int quality_final = 0;             // q2: whole image recompressed at this
    std::size_t feather_px = 0;        // soft paste edge; 0 = hard edge
};

// Procedurally textured image: channel gradients, a bank of low-frequency
// cosine waves, a few blended shapes, and light per-pixel noise. Guarantees
// nonzero AC energy everywhere at JPEG block scale.
inline RgbImage generate_texture(Rng& rng, std::size_t width, std::size_t height) {
    RgbImage img(width, height);
    double base[3], grad_x[3], grad_y[3];
    for (int c = 0; c < 3; ++c) {
        base[c] = rng.uniform(48.0, 208.0);
        grad_x[c] = rng.uniform(-70.0, 70.0);
        grad_y[c] = rng.uniform(-70.0, 70.0);
    }
    struct Wave {
        double fx, fy, phase, amp, weight[3];
    };
    std::vector<Wave> waves(static_cast<std::size_t>(rng.range(6, 12)));
    for (auto& w : waves) {
        w.fx = rng.uniform(0.5, 6.0);
        w.fy = rng.uniform(0.5, 6.0);
        w.phase = rng.uniform(0.0, 6.283185307179586);
        w.amp = rng.uniform(4.0, 18.0);
        for (int c = 0; c < 3; ++c) w.weight[c] = rng.uniform(0.2, 1.0);
    }

    std::vector<double> buf(width * height * 3);
    const double tau = 6.283185307179586;
    for (std::size_t y = 0; y < height; ++y) {
        const double fy = static_cast<double>(y) / static_cast<double>(height);
        for (std::size_t x = 0; x < width; ++x) {
            const double fx = static_cast<double>(x) / static_cast<double>(width);
            for (int c = 0; c < 3; ++c) {
                double v = base[c] + grad_x[c] * fx + grad_y[c] * fy;
                for (const auto& w : waves)
                    v += w.weight[c] * w.amp * std::cos(tau * (w.fx * fx + w.fy * fy) + w.phase);
                buf[(y * width + x) * 3 + static_cast<std::size_t>(c)] = v;
            }
        }
    }

    const int n_shapes = static_cast<int>(rng.range(3, 7));
    for (int s = 0; s < n_shapes; ++s) {
        const bool disc = rng.unit() < 0.5;
        const double alpha = rng.uniform(0.35, 0.9);
        double color[3];
        for (int c = 0; c < 3; ++c) color[c] = rng.uniform(0.0, 255.0);
        const std::size_t cx = static_cast<std::size_t>(rng.below(width));
        const std::size_t cy = static_cast<std::size_t>(rng.below(height));
        const std::size_t r =
            static_cast<std::size_t>(rng.range(static_cast<std::int64_t>(width / 12),
                                               static_cast<std::int64_t>(width / 4)));
        const std::size_t x0 = cx > r ? cx - r : 0, x1 = std::min(width - 1, cx + r);
        const std::size_t y0 = cy > r ? cy - r : 0, y1 = std::min(height - 1, cy + r);
        for (std::size_t y = y0; y <= y1; ++y)
            for (std::size_t x = x0; x <= x1; ++x) {
                if (disc) {
                    const double dx = static_cast<double>(x) - static_cast<double>(cx);
                    const double dy = static_cast<double>(y) - static_cast<double>(cy);
                    if (dx * dx + dy * dy > static_cast<double>(r) * static_cast<double>(r))
                        continue;
                }
                for (int c = 0; c < 3; ++c) {
                    double& v = buf[(y * width + x) * 3 + static_cast<std::size_t>(c)];
                    v = (1.0 - alpha) * v + alpha * color[c];
                }
            }
    }

    for (std::size_t i = 0; i < buf.size(); ++i) {
        const double noise = rng.uniform(-5.0, 5.0);
        img.data[i] = static_cast<std::uint8_t>(clamp255(std::round(buf[i] + noise)));
    }
    return img;
}

namespace detail {

inline void paste(RgbImage& host, const RgbImage& source, const Rect& src_rect,
                  std::size_t dest_x, std::size_t dest_y, std::size_t feather_px) {
    for (std::size_t dy = 0; dy < src_rect.h; ++dy) {
        for (std::size_t dx = 0; dx < src_rect.w; ++dx) {
            const std::uint8_t* sp = source.pixel(src_rect.x + dx, src_rect.y + dy);
            std::uint8_t* hp = host.pixel(dest_x + dx, dest_y + dy);
            double blend = 1.0;
            if (feather_px > 0) {
                const std::size_t edge = std::min(std::min(dx, src_rect.w - 1 - dx),
                                                  std::min(dy, src_rect.h - 1 - dy));
                if (edge < feather_px)
                    blend = static_cast<double>(edge + 1) / static_cast<double>(feather_px + 1);
            }
            for (int c = 0; c < 3; ++c)
                hp[c] = static_cast<std::uint8_t>(
                    clamp255(std::round(blend * sp[c] + (1.0 - blend) * hp[c])));
        }
    }
}

inline RgbImage jpeg_round_trip(const RgbImage& img, int quality) {
    const auto bytes = jpeg::encode_rgb(img, quality);
    return ycbcr_to_rgb_image(jpeg::decode(bytes));
}

} // namespace detail

struct ForgeryResult {
    RgbImage image;                      // decoded final image
    std::vector<std::uint8_t> jpeg_bytes; // set when post == JPEG_REQUANT
};

inline void validate_recipe(const ForgeryRecipe& r, std::size_t host_w, std::size_t host_h) {
    if (!r.region.inside(host_w, host_h) && r.kind == ForgeryKind::COPY_MOVE)
        throw RegionOutOfBounds("copy-move source region outside image bounds");
    const Rect dest{r.dest_x, r.dest_y, r.region.w, r.region.h};
    if (!dest.inside(host_w, host_h))
        throw RegionOutOfBounds("destination region outside image bounds");
    if (r.kind == ForgeryKind::COPY_MOVE && r.region.intersects(dest))
        throw RegionOutOfBounds("copy-move source and destination must be disjoint");
    if (r.post == PostProcess::JPEG_REQUANT && r.quality_donor == r.quality_final)
        throw Error("requantization forgery needs distinct donor/final qualities");
}

// Applies one forgery. With JPEG_REQUANT post-processing the pasted content
// originates from a quality_donor compression of its source image and the
// final composite is recompressed at quality_final, planting a block-artifact
// inconsistency inside the pasted region; with NONE the composite is returned
// untouched (the caller owns any final encode).
inline ForgeryResult apply_forgery(const RgbImage& host, const ForgeryRecipe& recipe,
                                   const RgbImage* donor, std::uint64_t /*seed*/) {
    validate_recipe(recipe, host.width, host.height);
    const RgbImage* source = &host;
    if (recipe.kind == ForgeryKind::SPLICE) {
        if (donor == nullptr) throw DonorMissing("splice recipe without a donor image");
        if (!recipe.region.inside(donor->width, donor->height))
            throw RegionOutOfBounds("splice source region outside donor bounds");
        source = donor;
    }

    ForgeryResult result;
    result.image = host;
    if (recipe.post == PostProcess::JPEG_REQUANT) {
        const RgbImage degraded = detail::jpeg_round_trip(*source, recipe.quality_donor);
        detail::paste(result.image, degraded, recipe.region, recipe.dest_x, recipe.dest_y,
                      recipe.feather_px);
        result.jpeg_bytes = jpeg::encode_rgb(result.image, recipe.quality_final);
        result.image = ycbcr_to_rgb_image(jpeg::decode(result.jpeg_bytes));
    } else {
        detail::paste(result.image, *source, recipe.region, recipe.dest_x, recipe.dest_y,
                      recipe.feather_px);
    }
    return result;
}

struct CorpusConfig {
    std::string id = "synthetic";
    std::size_t n_pristine = 200;
    std::size_t n_tampered = 200;
    std::size_t width = 128;
    std::size_t height = 128;
    double copy_move_fraction = 0.5; // forgery mix; the rest are splices
    std::uint64_t seed = 42;
    // difficulty knobs, both off by default: matched quality removes the
    // requantization cue, feathering softens the paste boundary
    bool matched_quality = false;
    std::size_t feather_px = 0;
    int quality_min = 82, quality_max = 92;       // final / pristine encode range
    int donor_quality_min = 25, donor_quality_max = 40;
    int release_year = 2020;
};

namespace detail {

// Regions are snapped to the 8-pixel JPEG block grid: an aligned paste keeps
// the donor's quantization structure intact through the final encode, which
// is exactly the artifact the easy corpus is meant to carry.
inline std::size_t snap8(std::size_t v) { return v & ~std::size_t{7}; }

inline Rect random_region(Rng& rng, std::size_t img_w, std::size_t img_h) {
    std::size_t w = snap8(static_cast<std::size_t>(
        rng.range(static_cast<std::int64_t>(img_w * 40 / 100),
                  static_cast<std::int64_t>(img_w * 60 / 100))));
    std::size_t h = snap8(static_cast<std::size_t>(
        rng.range(static_cast<std::int64_t>(img_h * 40 / 100),
                  static_cast<std::int64_t>(img_h * 60 / 100))));
    if (w < 8) w = 8;
    if (h < 8) h = 8;
    const std::size_t x = snap8(static_cast<std::size_t>(rng.below(img_w - w + 1)));
    const std::size_t y = snap8(static_cast<std::size_t>(rng.below(img_h - h + 1)));
    return Rect{x, y, w, h};
}

// source/destination pair for copy-move, disjoint by construction
inline void random_copy_move(Rng& rng, std::size_t img_w, std::size_t img_h, Rect& src,
                             std::size_t& dest_x, std::size_t& dest_y) {
    for (int attempt = 0; attempt < 200; ++attempt) {
        src = random_region(rng, img_w, img_h);
        dest_x = snap8(static_cast<std::size_t>(rng.below(img_w - src.w + 1)));
        dest_y = snap8(static_cast<std::size_t>(rng.below(img_h - src.h + 1)));
        const Rect dest{dest_x, dest_y, src.w, src.h};
        if (!src.intersects(dest)) return;
    }
    // fall back to opposite corners with a size that always fits twice
    const std::size_t w = snap8(img_w / 3), h = snap8(img_h / 3);
    src = Rect{0, 0, w, h};
    dest_x = snap8(img_w - w);
    dest_y = snap8(img_h - h);
}

} // namespace detail

// Writes <out_dir>/<id>/img_NNNNN.jpg plus <out_dir>/<id>.manifest and returns
// the manifest. Every byte is a function of the config (per-image seeds are
// derived as hash(seed, index)).
inline DatasetManifest build_corpus(const CorpusConfig& cfg,
                                    const std::filesystem::path& out_dir) {
    if (cfg.width < 64 || cfg.height < 64) throw Error("build_corpus: size must be >= 64x64");
    if (cfg.n_pristine + cfg.n_tampered == 0) throw Error("build_corpus: empty corpus");
    if (cfg.copy_move_fraction < 0.0 || cfg.copy_move_fraction > 1.0)
        throw Error("build_corpus: forgery mix must lie in [0, 1]");

    const std::filesystem::path img_dir = out_dir / cfg.id;
    std::filesystem::create_directories(img_dir);

    DatasetManifest manifest;
    manifest.id = cfg.id;
    manifest.release_year = cfg.release_year;
    manifest.forgery_types = {ForgeryType::SPLICE, ForgeryType::COPY_MOVE};
    manifest.in_the_wild = false;
    manifest.base_dir = out_dir;
    manifest.declared_subsample = {cfg.n_pristine, cfg.n_tampered};

    char name[32];
    const std::size_t n_copy_move = static_cast<std::size_t>(
        std::llround(cfg.copy_move_fraction * static_cast<double>(cfg.n_tampered)));

    const std::size_t total = cfg.n_pristine + cfg.n_tampered;
    for (std::size_t i = 0; i < total; ++i) {
        Rng rng(derive_seed(cfg.seed, i));
        std::snprintf(name, sizeof(name), "img_%05zu.jpg", i);
        const std::string rel = cfg.id + "/" + name;
        std::vector<std::uint8_t> bytes;
        ManifestEntry entry;
        entry.path = rel;
        entry.source_id = cfg.id;

        if (i < cfg.n_pristine) {
            const RgbImage img = generate_texture(rng, cfg.width, cfg.height);
            const int q = static_cast<int>(rng.range(cfg.quality_min, cfg.quality_max));
            bytes = jpeg::encode_rgb(img, q);
            entry.label = Label::PRISTINE;
        } else {
            const std::size_t t = i - cfg.n_pristine;
            RgbImage host = generate_texture(rng, cfg.width, cfg.height);
            ForgeryRecipe recipe;
            recipe.kind = (t < n_copy_move) ? ForgeryKind::COPY_MOVE : ForgeryKind::SPLICE;
            recipe.feather_px = cfg.feather_px;
            RgbImage donor;
            if (recipe.kind == ForgeryKind::COPY_MOVE) {
                detail::random_copy_move(rng, cfg.width, cfg.height, recipe.region, recipe.dest_x,
                                         recipe.dest_y);
            } else {
                donor = generate_texture(rng, cfg.width, cfg.height);
                recipe.region = detail::random_region(rng, cfg.width, cfg.height);
                recipe.dest_x = detail::snap8(
                    static_cast<std::size_t>(rng.below(cfg.width - recipe.region.w + 1)));
                recipe.dest_y = detail::snap8(
                    static_cast<std::size_t>(rng.below(cfg.height - recipe.region.h + 1)));
            }
            const int q_final = static_cast<int>(rng.range(cfg.quality_min, cfg.quality_max));
            if (cfg.matched_quality) {
                recipe.post = PostProcess::NONE;
                ForgeryResult forged = apply_forgery(
                    host, recipe, recipe.kind == ForgeryKind::SPLICE ? &donor : nullptr, 0);
                bytes = jpeg::encode_rgb(forged.image, q_final);
            } else {
                recipe.post = PostProcess::JPEG_REQUANT;
                recipe.quality_donor =
                    static_cast<int>(rng.range(cfg.donor_quality_min, cfg.donor_quality_max));
                recipe.quality_final = q_final;
                ForgeryResult forged = apply_forgery(
                    host, recipe, recipe.kind == ForgeryKind::SPLICE ? &donor : nullptr, 0);
                bytes = forged.jpeg_bytes;
            }
            entry.label = Label::TAMPERED;
        }
        write_file_bytes(img_dir / name, bytes);
        manifest.entries.push_back(std::move(entry));
    }

    save_manifest(manifest, out_dir / (cfg.id + ".manifest"));
    manifest.validate();
    return manifest;
}

// Pristine-only corpus: textured images encoded at a per-image seeded quality.
inline DatasetManifest gen_pristine(std::uint64_t seed, std::size_t count, std::size_t width,
                                    std::size_t height, const std::filesystem::path& out_dir,
                                    const std::string& id = "pristine") {
    CorpusConfig cfg;
    cfg.id = id;
    cfg.n_pristine = count;
    cfg.n_tampered = 0;
    cfg.width = width;
    cfg.height = height;
    cfg.seed = seed;
    return build_corpus(cfg, out_dir);
}

} // namespace synth
} // namespace forens
