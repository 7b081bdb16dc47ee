#pragma once

#include <cmath>
#include <cstddef>

#include "forens/errors.hpp"
#include "forens/image.hpp"

namespace forens {

// One level of orthonormal Haar decomposition. Band naming follows the
// (horizontal pass, vertical pass) filters: lh = low horizontal / high
// vertical, hl = high horizontal / low vertical.
struct DwtBands {
    ImagePlane ll;
    ImagePlane lh;
    ImagePlane hl;
    ImagePlane hh;
};

// Filters [1/sqrt2, 1/sqrt2] and [1/sqrt2, -1/sqrt2] over non-overlapping
// pairs; an odd trailing row/column is dropped before pairing, so the bands
// are floor(w/2) x floor(h/2). Band energies sum to the truncated input
// energy (orthonormality).
inline DwtBands haar_dwt1(const ImagePlane& plane) {
    if (plane.width < 2 || plane.height < 2)
        throw PlaneTooSmall("haar_dwt1: plane must be at least 2x2");
    const std::size_t w2 = plane.width / 2;
    const std::size_t h2 = plane.height / 2;
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

    // horizontal pass over the truncated plane
    ImagePlane low(w2, plane.height), high(w2, plane.height);
    for (std::size_t y = 0; y < plane.height; ++y) {
        for (std::size_t x = 0; x < w2; ++x) {
            const double a = plane.at(2 * x, y);
            const double b = plane.at(2 * x + 1, y);
            low.at(x, y) = (a + b) * inv_sqrt2;
            high.at(x, y) = (a - b) * inv_sqrt2;
        }
    }

    DwtBands bands{ImagePlane(w2, h2), ImagePlane(w2, h2), ImagePlane(w2, h2),
                   ImagePlane(w2, h2)};
    for (std::size_t y = 0; y < h2; ++y) {
        for (std::size_t x = 0; x < w2; ++x) {
            const double l0 = low.at(x, 2 * y), l1 = low.at(x, 2 * y + 1);
            const double g0 = high.at(x, 2 * y), g1 = high.at(x, 2 * y + 1);
            bands.ll.at(x, y) = (l0 + l1) * inv_sqrt2;
            bands.lh.at(x, y) = (l0 - l1) * inv_sqrt2;
            bands.hl.at(x, y) = (g0 + g1) * inv_sqrt2;
            bands.hh.at(x, y) = (g0 - g1) * inv_sqrt2;
        }
    }
    return bands;
}

} // namespace forens
