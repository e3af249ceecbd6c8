#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "gsmc/cloud.hpp"
#include "gsmc/morton.hpp"
#include "gsmc/pca.hpp"
#include "gsmc/quantize.hpp"

namespace gsmc {

// One M x M three-channel image of 10-bit samples. Planes are row-major.
struct AttributeImage {
    std::string tag;
    std::uint32_t side = 0;
    std::array<std::vector<std::uint16_t>, 3> planes;

    std::size_t pixel_count() const { return std::size_t(side) * side; }
    bool operator==(const AttributeImage&) const = default;
};

// The 7 + N_k images of one encoded cloud, in container order:
//   coord_hi, coord_lo, sh_dc, ac_0 .. ac_{N_k-1}, scale, opacity, rot_0, rot_1
struct AttributeMapSet {
    std::uint32_t side = 0;
    std::uint32_t n_real = 0;
    std::vector<AttributeImage> images;

    const AttributeImage* find(const std::string& tag) const;
};

// Image tags for k retained coefficients, in container order.
std::vector<std::string> image_tags(std::size_t k);

// Quantizes every attribute of the laid-out cloud into 10-bit planes.
// Coordinates are quantized at 20 bits and split across coord_hi/coord_lo
// (axes as the three channels). Opacity and rot_3 get mid-value padding
// channels. Padding cells replicate the last real primitive in scan order.
AttributeMapSet assemble(const GaussianCloud& sorted_cloud, const AcCoefficients& coeffs,
                         const GridLayout& layout, const QuantizationParams& params);

// Inverse of assemble for the first n_real scan ranks: joins coordinate
// planes, dequantizes every group, and reconstructs SH AC through the PCA
// model. Output order is scan order, not original file order.
GaussianCloud disassemble(const AttributeMapSet& maps, const QuantizationParams& params,
                          const PcaModel& pca);

} // namespace gsmc
