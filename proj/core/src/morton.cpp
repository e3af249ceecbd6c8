#include "gsmc/morton.hpp"

#include <algorithm>
#include <numeric>

namespace gsmc {

std::uint32_t GridLayout::raster_of_rank(std::uint64_t rank) const {
    auto [col, row] = morton2_decode(rank);
    return row * side + col;
}

std::vector<std::uint32_t> sort_by_morton(const GaussianCloud& cloud,
                                          const QuantizationParams& qp) {
    if (qp.positions.bits != kCoordBits) {
        throw ConfigError("sort_by_morton: position quantization must be 20-bit");
    }
    const std::size_t n = cloud.count;
    std::vector<std::uint64_t> codes(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::uint32_t q[3];
        for (int a = 0; a < 3; ++a) {
            q[a] = quantize_value(cloud.positions[i * 3 + a], qp.positions.min[a],
                                  qp.positions.max[a], kCoordBits);
        }
        codes[i] = morton3_encode(q[0], q[1], q[2]);
    }
    std::vector<std::uint32_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0u);
    std::stable_sort(perm.begin(), perm.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return codes[a] < codes[b]; });
    return perm;
}

GridLayout build_layout(std::uint64_t sorted_count) {
    if (sorted_count < 1) throw DataError("build_layout: need at least one primitive");
    std::uint64_t side = 1;
    while (side * side < sorted_count) side <<= 1;
    if (side > (std::uint64_t{1} << kCoordBits)) {
        throw DataError("build_layout: primitive count exceeds grid capacity");
    }

    GridLayout layout;
    layout.side = static_cast<std::uint32_t>(side);
    layout.n_real = static_cast<std::uint32_t>(sorted_count);
    layout.order.assign(side * side, kPaddingCell);
    for (std::uint64_t rank = 0; rank < sorted_count; ++rank) {
        layout.order[layout.raster_of_rank(rank)] = static_cast<std::uint32_t>(rank);
    }
    return layout;
}

} // namespace gsmc
