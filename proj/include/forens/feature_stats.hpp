#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "forens/dct.hpp"
#include "forens/errors.hpp"

namespace forens {

struct AcStatistics {
    std::vector<double> std_dev; // 63 entries, zig-zag order, DC excluded
    std::vector<double> ones;    // fraction of blocks with |round(c)| == 1
};

// Per-AC-position population standard deviation across blocks, plus the
// fraction of blocks whose coefficient rounds (half away from zero) to
// absolute value exactly 1. Blocks must all be 8x8.
inline AcStatistics ac_statistics(const std::vector<DctBlock>& blocks) {
    if (blocks.size() < 2) throw TooFewBlocks("ac_statistics: need at least 2 blocks");
    for (const DctBlock& b : blocks)
        if (b.n != 8) throw Error("ac_statistics: blocks must be 8x8");

    static const auto zz = zigzag_order(8);
    const double count = static_cast<double>(blocks.size());
    AcStatistics out;
    out.std_dev.resize(63);
    out.ones.resize(63);
    for (std::size_t k = 1; k < 64; ++k) {
        const std::size_t u = zz[k].first, v = zz[k].second;
        double sum = 0.0, sumsq = 0.0, one_hits = 0.0;
        for (const DctBlock& b : blocks) {
            const double c = b.at(u, v);
            sum += c;
            sumsq += c * c;
            if (std::abs(std::round(c)) == 1.0) one_hits += 1.0;
        }
        const double mean = sum / count;
        double var = sumsq / count - mean * mean;
        if (var < 0.0) var = 0.0;
        out.std_dev[k - 1] = std::sqrt(var);
        out.ones[k - 1] = one_hits / count;
    }
    return out;
}

// Mantissa of |a| in [1, 10); a must be nonzero.
inline double decimal_mantissa(double a) {
    a = std::abs(a);
    const int e = static_cast<int>(std::floor(std::log10(a)));
    double m = a / std::pow(10.0, e);
    if (m < 1.0) m *= 10.0;
    if (m >= 10.0) m /= 10.0;
    return m;
}

// 13 features over all nonzero AC coefficients of the blocks: the normalized
// first-digit histogram (9 bins) followed by the mean, population variance,
// skewness and excess kurtosis of the mantissa. Skewness and kurtosis are
// defined as 0 when the mantissa variance vanishes. Coefficients with
// magnitude <= 1e-9 count as zero, so the float DCT of flat content keeps the
// all-AC-zero contract.
inline constexpr double kMantissaZeroThreshold = 1e-9;

inline std::array<double, 13> mantissa_features(const std::vector<DctBlock>& blocks) {
    static const auto zz = zigzag_order(8);
    std::vector<double> mantissas;
    std::array<double, 13> out{};
    for (const DctBlock& b : blocks) {
        if (b.n != 8) throw Error("mantissa_features: blocks must be 8x8");
        for (std::size_t k = 1; k < 64; ++k) {
            const double c = b.at(zz[k].first, zz[k].second);
            if (std::abs(c) <= kMantissaZeroThreshold) continue;
            const double m = decimal_mantissa(c);
            int digit = static_cast<int>(m);
            if (digit < 1) digit = 1;
            if (digit > 9) digit = 9;
            out[static_cast<std::size_t>(digit - 1)] += 1.0;
            mantissas.push_back(m);
        }
    }
    if (mantissas.empty())
        throw NoNonzeroCoefficients("mantissa_features: all AC coefficients are zero");

    const double n = static_cast<double>(mantissas.size());
    for (std::size_t d = 0; d < 9; ++d) out[d] /= n;

    double mean = 0.0;
    for (double m : mantissas) mean += m;
    mean /= n;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double m : mantissas) {
        const double d = m - mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    out[9] = mean;
    out[10] = m2;
    if (m2 > 0.0) {
        const double sd = std::sqrt(m2);
        out[11] = m3 / (sd * sd * sd);
        out[12] = m4 / (m2 * m2) - 3.0;
    } else {
        out[11] = 0.0;
        out[12] = 0.0;
    }
    return out;
}

} // namespace forens
