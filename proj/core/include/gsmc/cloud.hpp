#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace gsmc {

// Channel widths of one splat primitive: 3 position + 3 SH DC + 45 SH AC
// + 1 opacity + 3 scale + 4 rotation = 59 floats.
inline constexpr std::size_t kPositionChannels = 3;
inline constexpr std::size_t kShDcChannels = 3;
inline constexpr std::size_t kShAcChannels = 45;
inline constexpr std::size_t kOpacityChannels = 1;
inline constexpr std::size_t kScaleChannels = 3;
inline constexpr std::size_t kRotationChannels = 4;
inline constexpr std::size_t kTotalChannels =
    kPositionChannels + kShDcChannels + kShAcChannels + kOpacityChannels +
    kScaleChannels + kRotationChannels;

// A splat point set with attributes kept in the file's native
// parameterization: scales stay log-space, quaternions stay unnormalized.
// Arrays are row-major, N x channels.
struct GaussianCloud {
    std::size_t count = 0;
    std::vector<float> positions;  // N*3
    std::vector<float> sh_dc;      // N*3
    std::vector<float> sh_ac;      // N*45
    std::vector<float> opacity;    // N*1
    std::vector<float> scale;      // N*3
    std::vector<float> rotation;   // N*4

    static GaussianCloud zeros(std::size_t n);

    // Checks array sizes, N >= 1 and that every value is finite.
    // Throws DataError otherwise.
    void validate() const;

    bool operator==(const GaussianCloud& other) const = default;
};

// Gathers rows so that output row i is input row perm[i]. perm must be a
// permutation of 0..N-1.
GaussianCloud apply_permutation(const GaussianCloud& cloud,
                                const std::vector<std::uint32_t>& perm);

// Sorts primitives into a canonical row order (lexicographic over the raw
// float bit patterns of all 59 channels). Used for order-insensitive
// point-set comparison.
GaussianCloud canonical_order(const GaussianCloud& cloud);

} // namespace gsmc
