#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "gsmc/cloud.hpp"
#include "gsmc/quantize.hpp"

namespace gsmc {

inline constexpr std::uint32_t kPaddingCell = 0xffffffffu;

// Square pixel grid holding one sorted-primitive index per cell.
// side is a power of two and side^2 >= n_real; cells whose Z-order scan
// rank is >= n_real hold kPaddingCell.
struct GridLayout {
    std::uint32_t side = 0;
    std::uint32_t n_real = 0;
    std::vector<std::uint32_t> order; // raster index -> sorted primitive index

    std::uint32_t raster_of_rank(std::uint64_t rank) const;
};

namespace detail {

inline std::uint64_t spread_bits_3(std::uint64_t x) {
    x &= 0x1fffff;
    x = (x | x << 32) & 0x001f00000000ffffULL;
    x = (x | x << 16) & 0x001f0000ff0000ffULL;
    x = (x | x << 8) & 0x100f00f00f00f00fULL;
    x = (x | x << 4) & 0x10c30c30c30c30c3ULL;
    x = (x | x << 2) & 0x1249249249249249ULL;
    return x;
}

inline std::uint64_t spread_bits_2(std::uint64_t x) {
    x &= 0xffffffff;
    x = (x | x << 16) & 0x0000ffff0000ffffULL;
    x = (x | x << 8) & 0x00ff00ff00ff00ffULL;
    x = (x | x << 4) & 0x0f0f0f0f0f0f0f0fULL;
    x = (x | x << 2) & 0x3333333333333333ULL;
    x = (x | x << 1) & 0x5555555555555555ULL;
    return x;
}

inline std::uint64_t compact_bits_2(std::uint64_t x) {
    x &= 0x5555555555555555ULL;
    x = (x | x >> 1) & 0x3333333333333333ULL;
    x = (x | x >> 2) & 0x0f0f0f0f0f0f0f0fULL;
    x = (x | x >> 4) & 0x00ff00ff00ff00ffULL;
    x = (x | x >> 8) & 0x0000ffff0000ffffULL;
    x = (x | x >> 16) & 0x00000000ffffffffULL;
    return x;
}

} // namespace detail

// Interleaves three 20-bit coordinates; bit j of x lands at code bit 3j,
// y at 3j+1, z at 3j+2.
inline std::uint64_t morton3_encode(std::uint32_t x, std::uint32_t y, std::uint32_t z) {
    constexpr std::uint32_t limit = 1u << kCoordBits;
    if (x >= limit || y >= limit || z >= limit) {
        throw DataError("morton3_encode: coordinate exceeds 20 bits");
    }
    return detail::spread_bits_3(x) | detail::spread_bits_3(y) << 1 |
           detail::spread_bits_3(z) << 2;
}

// 2D Z-order scan rank of (col, row); bit j of col at rank bit 2j, row at 2j+1.
inline std::uint64_t morton2_encode(std::uint32_t col, std::uint32_t row) {
    return detail::spread_bits_2(col) | detail::spread_bits_2(row) << 1;
}

inline std::pair<std::uint32_t, std::uint32_t> morton2_decode(std::uint64_t rank) {
    if (rank >= (std::uint64_t{1} << (2 * kCoordBits))) {
        throw DataError("morton2_decode: rank exceeds 40 bits");
    }
    return {static_cast<std::uint32_t>(detail::compact_bits_2(rank)),
            static_cast<std::uint32_t>(detail::compact_bits_2(rank >> 1))};
}

// Stable sort of primitives by the 3D Morton code of their quantized
// positions; ties keep original order. Returns the permutation: output
// slot i holds the original index of the i-th primitive in scan order.
std::vector<std::uint32_t> sort_by_morton(const GaussianCloud& cloud,
                                          const QuantizationParams& qp);

// Places sorted primitive i at the cell with 2D Z-order rank i on the
// smallest power-of-two grid that fits; remaining ranks are padding.
GridLayout build_layout(std::uint64_t sorted_count);

} // namespace gsmc
