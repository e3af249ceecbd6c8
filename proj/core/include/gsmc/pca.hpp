#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gsmc/cloud.hpp"

namespace gsmc {

// Reduction strategies for the 45 SH AC channels:
//   joint      - one PCA over the full 45-dim feature matrix
//   per_color  - three independent 15-dim PCAs, one per color slice,
//                components merged into a global descending-variance order
//   order_clip - no PCA; channels reordered low SH order first (colors
//                interleaved per coefficient) and the tail clipped
enum class PcaMode { joint, per_color, order_clip };

const char* pca_mode_name(PcaMode mode);
PcaMode pca_mode_from_name(const std::string& name);

struct PcaModel {
    PcaMode mode = PcaMode::joint;
    std::uint32_t k = 0;       // columns available in `basis`
    std::vector<float> mean;   // 45
    std::vector<float> basis;  // 45 x k, column-major: component j occupies [45j, 45j+45)
    std::vector<float> evr;    // explained-variance ratios; empty on parsed models

    float basis_at(std::size_t row, std::size_t component) const {
        return basis[component * kShAcChannels + row];
    }
};

struct AcCoefficients {
    std::uint32_t k = 0;
    std::vector<float> coeffs; // N x k row-major
};

// Fits the reduction model on the N x 45 row-major AC matrix. PCA modes
// need N >= 2; the eigen-decomposition runs on the 45 x 45 covariance
// (1/(N-1)) accumulated in double with a fixed row blocking, so results do
// not depend on threading. Component signs are fixed by making the
// largest-magnitude entry of each column positive.
PcaModel fit_pca(const std::vector<float>& sh_ac, std::size_t n, PcaMode mode);

// coeffs = (x - mean) * basis[:, 0..k). k must be a positive multiple of 3
// so coefficient channels tile into whole 3-channel images.
AcCoefficients project(const PcaModel& model, const std::vector<float>& sh_ac, std::size_t n,
                       std::uint32_t k);

// x = mean + coeffs * basis[:, 0..k)^T, returned as N x 45 row-major.
std::vector<float> reconstruct(const PcaModel& model, const AcCoefficients& coeffs);

// Decoder metadata: mode + k + mean + truncated basis as 32-bit LE floats.
// order_clip omits the basis (the fixed reordering is implied by the mode).
std::vector<std::uint8_t> serialize_model(const PcaModel& model, std::uint32_t k);
PcaModel parse_model(std::span<const std::uint8_t> bytes);

// Channel index holding component j of the order_clip reordering.
std::size_t order_clip_channel(std::size_t component);

} // namespace gsmc
