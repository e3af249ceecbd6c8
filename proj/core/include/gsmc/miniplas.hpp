#pragma once

#include <cstdint>
#include <vector>

#include "gsmc/cloud.hpp"
#include "gsmc/morton.hpp"
#include "gsmc/pca.hpp"
#include "gsmc/quantize.hpp"

namespace gsmc {

// Grid of per-pixel feature vectors used as the permutation objective.
// Every channel is pre-normalized to [0,1] by its quantization range.
struct FeatureGrid {
    std::uint32_t side = 0;
    std::vector<std::vector<float>> channels; // C planes of side*side
    std::vector<float> weights;               // C non-negative weights

    std::size_t channel_count() const { return channels.size(); }
};

// Relative objective weight of each channel group when scoring permutations.
struct GroupWeights {
    float positions = 1.0f;
    float sh_dc = 1.0f;
    float ac = 1.0f;
    float opacity = 1.0f;
    float scale = 1.0f;
    float rotation = 1.0f;
};

// Progressive block-size schedule: passes run at [mbs, mbs/2, ..., 4],
// iterations_per_size times each.
struct PlasSchedule {
    std::uint32_t mbs = 4;
    std::uint32_t iterations_per_size = 1;
    std::uint64_t seed = 0;

    std::vector<std::uint32_t> block_sizes() const;
    void validate(std::uint32_t side) const; // throws ConfigError
};

struct PassOutcome {
    double cost_delta = 0.0; // change of the distance-to-target objective, <= 0
    std::uint64_t op_count = 0;
};

struct PassReport {
    std::uint32_t block_size = 0;
    std::uint32_t iteration = 0;
    std::uint64_t op_count = 0;
    double target_cost_before = 0.0;
    double target_cost_after = 0.0;
    double smoothness_after = 0.0;
    double millis = 0.0;
};

struct MiniplasReport {
    std::vector<PassReport> passes;
    double smoothness_initial = 0.0;
    double smoothness_final = 0.0;
    std::uint64_t boundary_swaps = 0;
    double total_millis = 0.0;
};

// Mean weighted squared difference over all horizontally and vertically
// adjacent pixel pairs (normalized by pair count).
double smoothness_cost(const FeatureGrid& grid);

// Per-channel 3x3 box filter with edge clamping.
FeatureGrid blur_target(const FeatureGrid& grid);

// Weighted squared distance of the grid to a target grid, summed over cells.
double target_cost(const FeatureGrid& grid, const FeatureGrid& target);

// The shuffled cell order (block-local indices) a pass uses inside one
// block; consecutive quadruples form the permutation groups.
std::vector<std::uint32_t> block_grouping(std::uint32_t block_size, std::uint64_t seed,
                                          std::uint32_t pass_index, std::uint32_t block_x,
                                          std::uint32_t block_y);

// One refinement pass at block size B: freezes a blurred target, then for
// every aligned BxB block partitions its pixels into groups of 4 and applies
// the best of the 24 feature-to-position assignments per group (ties pick
// the lexicographically smallest permutation). Grid and layout are permuted
// together. op_count is exactly (M/B)^2 * (B^2/4) * 24. Blocks are
// independent; per-block RNG streams derive from (seed, pass_index, block),
// so the result does not depend on threading.
PassOutcome optimize_pass(FeatureGrid& grid, GridLayout& layout, std::uint32_t block_size,
                          std::uint64_t seed, std::uint32_t pass_index, unsigned threads = 1);

// Runs the whole schedule, re-blurring the target before every pass, then
// restores the scan-rank invariant (real primitives at ranks < n_real) so
// decoders can drop padding by rank alone.
MiniplasReport run_miniplas(FeatureGrid& grid, GridLayout& layout, const PlasSchedule& schedule,
                            unsigned threads = 1);

// Assembles the normalized feature grid for a laid-out cloud. Padding cells
// replicate the features of the last real primitive in scan order.
FeatureGrid build_feature_grid(const GaussianCloud& sorted_cloud, const AcCoefficients& coeffs,
                               const GridLayout& layout, const QuantizationParams& params,
                               const GroupWeights& weights = {});

} // namespace gsmc
