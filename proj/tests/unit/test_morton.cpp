#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <set>

#include <gtest/gtest.h>

#include "gsmc/morton.hpp"
#include "gsmc/rng.hpp"
#include "gsmc/synthetic.hpp"
#include "test_util.hpp"

using namespace gsmc;

namespace {

// Bit-by-bit interleave, independent of the table/shift tricks under test.
std::uint64_t morton3_oracle(std::uint32_t x, std::uint32_t y, std::uint32_t z) {
    std::uint64_t code = 0;
    for (int j = 0; j < 20; ++j) {
        code |= std::uint64_t((x >> j) & 1) << (3 * j);
        code |= std::uint64_t((y >> j) & 1) << (3 * j + 1);
        code |= std::uint64_t((z >> j) & 1) << (3 * j + 2);
    }
    return code;
}

std::uint64_t morton2_oracle(std::uint32_t col, std::uint32_t row) {
    std::uint64_t code = 0;
    for (int j = 0; j < 32; ++j) {
        code |= std::uint64_t((col >> j) & 1) << (2 * j);
        code |= std::uint64_t((row >> j) & 1) << (2 * j + 1);
    }
    return code;
}

} // namespace

TEST(Morton, Morton3KnownValues) {
    // (3,5,1): x bits at 3j, y at 3j+1, z at 3j+2.
    EXPECT_EQ(morton3_encode(3, 5, 1), morton3_oracle(3, 5, 1));
    EXPECT_EQ(morton3_encode(0, 0, 0), 0u);
    EXPECT_EQ(morton3_encode(1, 0, 0), 1u);
    EXPECT_EQ(morton3_encode(0, 1, 0), 2u);
    EXPECT_EQ(morton3_encode(0, 0, 1), 4u);
}

TEST(Morton, Morton3MatchesOracleOnRandomTriples) {
    SplitMix64 rng(2024);
    for (int i = 0; i < 20000; ++i) {
        const auto x = static_cast<std::uint32_t>(rng.below(1u << 20));
        const auto y = static_cast<std::uint32_t>(rng.below(1u << 20));
        const auto z = static_cast<std::uint32_t>(rng.below(1u << 20));
        ASSERT_EQ(morton3_encode(x, y, z), morton3_oracle(x, y, z));
    }
}

TEST(Morton, Morton3RejectsWideCoordinates) {
    EXPECT_THROW(morton3_encode(1u << 20, 0, 0), DataError);
    EXPECT_THROW(morton3_encode(0, 1u << 20, 0), DataError);
    EXPECT_THROW(morton3_encode(0, 0, 1u << 20), DataError);
}

TEST(Morton, Morton2RoundtripExhaustive16Bit) {
    for (std::uint64_t rank = 0; rank < (1u << 16); ++rank) {
        const auto [col, row] = morton2_decode(rank);
        ASSERT_EQ(morton2_encode(col, row), rank);
        ASSERT_EQ(morton2_oracle(col, row), rank);
    }
}

TEST(Morton, Morton2DecodeRejectsWideRank) {
    EXPECT_THROW(morton2_decode(std::uint64_t{1} << 40), DataError);
}

TEST(Morton, SortMatchesComparisonSortOracle) {
    GaussianCloud cloud = gsmc_test::random_cloud(256, 77);
    QuantizationParams params = compute_ranges(cloud, {}, 0);
    std::vector<std::uint32_t> perm = sort_by_morton(cloud, params);

    std::vector<std::pair<std::uint64_t, std::uint32_t>> keyed(256);
    for (std::uint32_t i = 0; i < 256; ++i) {
        std::uint32_t q[3];
        for (int a = 0; a < 3; ++a) {
            q[a] = quantize_value(cloud.positions[i * 3 + a], params.positions.min[a],
                                  params.positions.max[a], kCoordBits);
        }
        keyed[i] = {morton3_oracle(q[0], q[1], q[2]), i};
    }
    std::sort(keyed.begin(), keyed.end());
    for (std::size_t i = 0; i < keyed.size(); ++i) ASSERT_EQ(perm[i], keyed[i].second);
}

TEST(Morton, SortIsStableOnTies) {
    GaussianCloud cloud = GaussianCloud::zeros(6);
    // Two groups of identical positions, interleaved by index.
    for (std::size_t i = 0; i < 6; ++i) {
        const float v = (i % 2 == 0) ? 1.0f : 2.0f;
        cloud.positions[i * 3 + 0] = v;
        cloud.positions[i * 3 + 1] = v;
        cloud.positions[i * 3 + 2] = v;
    }
    QuantizationParams params = compute_ranges(cloud, {}, 0);
    std::vector<std::uint32_t> perm = sort_by_morton(cloud, params);
    EXPECT_EQ(perm, (std::vector<std::uint32_t>{0, 2, 4, 1, 3, 5}));
}

TEST(Morton, SortRejectsNonCoordinateBits) {
    GaussianCloud cloud = gsmc_test::random_cloud(4, 1);
    QuantizationParams params = compute_ranges(cloud, {}, 0);
    params.positions.bits = 10;
    EXPECT_THROW(sort_by_morton(cloud, params), ConfigError);
}

TEST(Layout, SmallestPowerOfTwoSide) {
    EXPECT_EQ(build_layout(1).side, 1u);
    EXPECT_EQ(build_layout(2).side, 2u);
    EXPECT_EQ(build_layout(4).side, 2u);
    EXPECT_EQ(build_layout(5).side, 4u);
    EXPECT_EQ(build_layout(16).side, 4u);
    EXPECT_EQ(build_layout(17).side, 8u);
    EXPECT_EQ(build_layout(576724).side, 1024u);
    EXPECT_THROW(build_layout(0), DataError);
}

TEST(Layout, RanksCoverGridInZOrder) {
    GridLayout layout = build_layout(64);
    ASSERT_EQ(layout.side, 8u);
    std::set<std::uint32_t> seen;
    for (std::uint64_t rank = 0; rank < 64; ++rank) {
        const std::uint32_t raster = layout.raster_of_rank(rank);
        ASSERT_LT(raster, 64u);
        ASSERT_EQ(layout.order[raster], rank);
        seen.insert(raster);
    }
    EXPECT_EQ(seen.size(), 64u);
}

TEST(Layout, Aligned4x4BlocksHold16ConsecutiveRanks) {
    for (std::uint32_t side : {4u, 16u, 64u}) {
        GridLayout layout = build_layout(std::uint64_t(side) * side);
        for (std::uint32_t by = 0; by < side / 4; ++by) {
            for (std::uint32_t bx = 0; bx < side / 4; ++bx) {
                std::vector<std::uint64_t> ranks;
                for (std::uint32_t dy = 0; dy < 4; ++dy) {
                    for (std::uint32_t dx = 0; dx < 4; ++dx) {
                        ranks.push_back(morton2_encode(bx * 4 + dx, by * 4 + dy));
                    }
                }
                std::sort(ranks.begin(), ranks.end());
                for (std::size_t i = 1; i < ranks.size(); ++i) {
                    ASSERT_EQ(ranks[i], ranks[0] + i) << "side " << side << " block "
                                                      << bx << "," << by;
                }
            }
        }
    }
}

TEST(Layout, PaddingCellsPastCount) {
    GridLayout layout = build_layout(5);
    ASSERT_EQ(layout.side, 4u);
    std::size_t padding = 0;
    for (std::uint32_t v : layout.order) padding += v == kPaddingCell;
    EXPECT_EQ(padding, 11u);
    for (std::uint64_t rank = 5; rank < 16; ++rank) {
        EXPECT_EQ(layout.order[layout.raster_of_rank(rank)], kPaddingCell);
    }
}

// Spatial locality of the two-stage scan: horizontally adjacent cells hold
// primitives closer in quantized position than a random placement does.
TEST(Layout, AdjacentCellsCloserThanRandom) {
    for (std::uint64_t trial = 0; trial < 10; ++trial) {
        SyntheticConfig cfg;
        cfg.count = 2000;
        cfg.seed = 100 + trial;
        GaussianCloud cloud = generate_cloud(cfg);
        QuantizationParams params = compute_ranges(cloud, {}, 0);
        GaussianCloud sorted = apply_permutation(cloud, sort_by_morton(cloud, params));
        GridLayout layout = build_layout(sorted.count);

        std::vector<std::array<double, 3>> q(sorted.count);
        for (std::size_t i = 0; i < sorted.count; ++i) {
            for (int a = 0; a < 3; ++a) {
                q[i][a] = quantize_value(sorted.positions[i * 3 + a], params.positions.min[a],
                                         params.positions.max[a], kCoordBits);
            }
        }

        GridLayout random = layout;
        std::vector<std::uint32_t> ranks(layout.n_real);
        std::iota(ranks.begin(), ranks.end(), 0u);
        SplitMix64 rng(mix_seed(trial, 0xabcd));
        shuffle(ranks.data(), ranks.size(), rng);
        for (std::uint64_t r = 0; r < layout.n_real; ++r) {
            random.order[random.raster_of_rank(r)] = ranks[r];
        }

        auto mean_neighbor_distance = [&](const GridLayout& l) {
            double sum = 0.0;
            std::size_t pairs = 0;
            for (std::uint32_t row = 0; row < l.side; ++row) {
                for (std::uint32_t col = 0; col + 1 < l.side; ++col) {
                    const std::uint32_t a = l.order[row * l.side + col];
                    const std::uint32_t b = l.order[row * l.side + col + 1];
                    if (a == kPaddingCell || b == kPaddingCell) continue;
                    double d2 = 0.0;
                    for (int axis = 0; axis < 3; ++axis) {
                        const double d = q[a][axis] - q[b][axis];
                        d2 += d * d;
                    }
                    sum += std::sqrt(d2);
                    ++pairs;
                }
            }
            return sum / double(pairs);
        };

        EXPECT_LT(mean_neighbor_distance(layout), mean_neighbor_distance(random))
            << "trial " << trial;
    }
}
