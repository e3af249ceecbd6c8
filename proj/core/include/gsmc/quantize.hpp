#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "gsmc/cloud.hpp"
#include "gsmc/error.hpp"

namespace gsmc {

inline constexpr int kCoordBits = 20;
inline constexpr int kAttributeBits = 10;
inline constexpr std::uint16_t kMidValue10 = 512; // mid-value used to pad 10-bit channels

// Per-channel quantization range. A constant channel keeps max == min and
// dequantizes back to min.
struct ChannelGroupParams {
    int bits = kAttributeBits;
    std::vector<float> min;
    std::vector<float> max;

    bool constant(std::size_t ch) const { return !(max[ch] > min[ch]); }
    bool operator==(const ChannelGroupParams&) const = default;
};

struct QuantizationParams {
    ChannelGroupParams positions; // 3 channels sharing one cubic range, 20-bit
    ChannelGroupParams sh_dc;     // 3
    ChannelGroupParams ac;        // k
    ChannelGroupParams opacity;   // 1
    ChannelGroupParams scale;     // 3
    ChannelGroupParams rotation;  // 4

    bool operator==(const QuantizationParams&) const = default;
};

inline std::uint32_t quantize_value(float v, float lo, float hi, int bits) {
    if (!(hi > lo)) return 0;
    const double scale = static_cast<double>((std::uint32_t{1} << bits) - 1);
    const double t = (static_cast<double>(v) - lo) / (static_cast<double>(hi) - lo);
    if (t <= 0.0) return 0;
    if (t >= 1.0) return static_cast<std::uint32_t>(scale);
    return static_cast<std::uint32_t>(std::llround(t * scale));
}

inline float dequantize_value(std::uint32_t q, float lo, float hi, int bits) {
    if (!(hi > lo)) return lo;
    const double scale = static_cast<double>((std::uint32_t{1} << bits) - 1);
    return static_cast<float>(lo + (static_cast<double>(hi) - lo) * (q / scale));
}

// 20-bit coordinate samples are carried as two 10-bit planes.
inline std::pair<std::uint16_t, std::uint16_t> split_hi_lo(std::uint32_t q20) {
    if (q20 >= (std::uint32_t{1} << kCoordBits)) {
        throw DataError("20-bit sample out of range: " + std::to_string(q20));
    }
    return {static_cast<std::uint16_t>(q20 >> 10), static_cast<std::uint16_t>(q20 & 1023u)};
}

inline std::uint32_t join_hi_lo(std::uint16_t hi, std::uint16_t lo) {
    if (hi >= 1024 || lo >= 1024) throw DataError("10-bit plane sample out of range");
    return (static_cast<std::uint32_t>(hi) << 10) | lo;
}

// Scans per-group min/max. Positions get one shared range over all three
// axes so spatial resolution stays isotropic; every other group is
// per-channel. `ac` is the row-major N x k coefficient matrix.
QuantizationParams compute_ranges(const GaussianCloud& cloud, const std::vector<float>& ac,
                                  std::size_t k);

} // namespace gsmc
