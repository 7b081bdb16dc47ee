#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "forens/errors.hpp"
#include "forens/image.hpp"

namespace forens {

// Orthonormal type-II 2-D DCT of an n x n block. coeffs[0] is DC.
struct DctBlock {
    std::size_t n = 0;
    std::vector<double> coeffs; // row-major, (u, v) = coeffs[u * n + v]

    double at(std::size_t u, std::size_t v) const { return coeffs[u * n + v]; }
    double& at(std::size_t u, std::size_t v) { return coeffs[u * n + v]; }

    double energy() const {
        double e = 0.0;
        for (double c : coeffs) e += c * c;
        return e;
    }
};

namespace detail {

// cos((2i+1) u pi / 2n) scaled by a(u); a(0)=sqrt(1/n), a(u)=sqrt(2/n).
inline std::vector<double> dct_basis(std::size_t n) {
    std::vector<double> basis(n * n);
    const double pi = 3.14159265358979323846264338327950288;
    for (std::size_t u = 0; u < n; ++u) {
        const double a = (u == 0) ? std::sqrt(1.0 / static_cast<double>(n))
                                  : std::sqrt(2.0 / static_cast<double>(n));
        for (std::size_t i = 0; i < n; ++i)
            basis[u * n + i] =
                a * std::cos((2.0 * static_cast<double>(i) + 1.0) * static_cast<double>(u) * pi /
                             (2.0 * static_cast<double>(n)));
    }
    return basis;
}

inline const std::vector<double>& cached_basis(std::size_t n) {
    if (n == 8) {
        static const std::vector<double> b8 = dct_basis(8);
        return b8;
    }
    if (n == 16) {
        static const std::vector<double> b16 = dct_basis(16);
        return b16;
    }
    thread_local std::size_t last_n = 0;
    thread_local std::vector<double> last;
    if (last_n != n) {
        last = dct_basis(n);
        last_n = n;
    }
    return last;
}

} // namespace detail

// Forward transform, separable: rows then columns.
inline DctBlock dct2(const std::vector<double>& samples, std::size_t n) {
    if (n < 2 || samples.size() != n * n) throw Error("dct2: need n >= 2 and n*n samples");
    const std::vector<double>& B = detail::cached_basis(n);
    std::vector<double> tmp(n * n), out(n * n);
    // rows: tmp[i][v] = sum_j x[i][j] B[v][j]
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t v = 0; v < n; ++v) {
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) acc += samples[i * n + j] * B[v * n + j];
            tmp[i * n + v] = acc;
        }
    // columns: out[u][v] = sum_i tmp[i][v] B[u][i]
    for (std::size_t u = 0; u < n; ++u)
        for (std::size_t v = 0; v < n; ++v) {
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) acc += tmp[i * n + v] * B[u * n + i];
            out[u * n + v] = acc;
        }
    return DctBlock{n, std::move(out)};
}

inline DctBlock dct2(const BlockView& block) { return dct2(block.to_matrix(), block.side); }

// Inverse transform; idct2(dct2(x)) == x within 1e-9 per sample.
inline std::vector<double> idct2(const DctBlock& block) {
    const std::size_t n = block.n;
    if (n < 2 || block.coeffs.size() != n * n) throw Error("idct2: malformed block");
    const std::vector<double>& B = detail::cached_basis(n);
    std::vector<double> tmp(n * n), out(n * n);
    // columns: tmp[i][v] = sum_u X[u][v] B[u][i]
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t v = 0; v < n; ++v) {
            double acc = 0.0;
            for (std::size_t u = 0; u < n; ++u) acc += block.coeffs[u * n + v] * B[u * n + i];
            tmp[i * n + v] = acc;
        }
    // rows: out[i][j] = sum_v tmp[i][v] B[v][j]
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double acc = 0.0;
            for (std::size_t v = 0; v < n; ++v) acc += tmp[i * n + v] * B[v * n + j];
            out[i * n + j] = acc;
        }
    return out;
}

// (u, v) index pairs in zig-zag scan order; position 0 is DC.
inline std::vector<std::pair<std::size_t, std::size_t>> zigzag_order(std::size_t n) {
    std::vector<std::pair<std::size_t, std::size_t>> order;
    order.reserve(n * n);
    for (std::size_t s = 0; s + 1 < 2 * n; ++s) {
        if (s % 2 == 0) { // walking up-right: u decreasing
            std::size_t u = (s < n) ? s : n - 1;
            std::size_t v = s - u;
            while (true) {
                order.emplace_back(u, v);
                if (u == 0 || v + 1 == n) break;
                --u;
                ++v;
            }
        } else { // walking down-left: v decreasing
            std::size_t v = (s < n) ? s : n - 1;
            std::size_t u = s - v;
            while (true) {
                order.emplace_back(u, v);
                if (v == 0 || u + 1 == n) break;
                --v;
                ++u;
            }
        }
    }
    return order;
}

} // namespace forens
