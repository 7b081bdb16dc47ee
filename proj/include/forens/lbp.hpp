#pragma once

#include <cstddef>
#include <vector>

#include "forens/errors.hpp"
#include "forens/image.hpp"

namespace forens {

// 8-neighbour radius-1 LBP. Bit i is set iff neighbour_i >= center, with the
// neighbour order fixed as east first, then counter-clockwise (y axis points
// down, so "up" is row - 1): E, NE, N, NW, W, SW, S, SE.
// The one-pixel border is skipped; output is (width-2) x (height-2).
inline ImagePlane lbp_map(const ImagePlane& plane) {
    if (plane.width < 3 || plane.height < 3)
        throw PlaneTooSmall("lbp_map: plane must be at least 3x3");
    static constexpr int dx[8] = {1, 1, 0, -1, -1, -1, 0, 1};
    static constexpr int dy[8] = {0, -1, -1, -1, 0, 1, 1, 1};
    ImagePlane out(plane.width - 2, plane.height - 2);
    for (std::size_t y = 1; y + 1 < plane.height; ++y) {
        for (std::size_t x = 1; x + 1 < plane.width; ++x) {
            const double c = plane.at(x, y);
            unsigned code = 0;
            for (int b = 0; b < 8; ++b) {
                const double nb = plane.at(x + static_cast<std::size_t>(dx[b]),
                                           y + static_cast<std::size_t>(dy[b]));
                if (nb >= c) code |= 1u << b;
            }
            out.at(x - 1, y - 1) = static_cast<double>(code);
        }
    }
    return out;
}

// Normalized 256-bin histogram of LBP codes; entries sum to 1.
inline std::vector<double> lbp_histogram(const ImagePlane& codes) {
    if (codes.size() == 0) throw EmptyPlane("lbp_histogram: empty code plane");
    std::vector<double> hist(256, 0.0);
    for (double c : codes.samples) {
        const int bin = static_cast<int>(c);
        hist[static_cast<std::size_t>(bin < 0 ? 0 : (bin > 255 ? 255 : bin))] += 1.0;
    }
    const double total = static_cast<double>(codes.size());
    for (double& h : hist) h /= total;
    return hist;
}

} // namespace forens
