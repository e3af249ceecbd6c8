#include "gsmc/miniplas.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <numeric>
#include <string>

#include "gsmc/error.hpp"
#include "gsmc/parallel.hpp"
#include "gsmc/rng.hpp"

namespace gsmc {

namespace {

// All permutations of {0,1,2,3} in lexicographic order; index 0 is identity.
constexpr std::array<std::array<std::uint8_t, 4>, 24> kPerm4 = {{
    {0, 1, 2, 3}, {0, 1, 3, 2}, {0, 2, 1, 3}, {0, 2, 3, 1}, {0, 3, 1, 2}, {0, 3, 2, 1},
    {1, 0, 2, 3}, {1, 0, 3, 2}, {1, 2, 0, 3}, {1, 2, 3, 0}, {1, 3, 0, 2}, {1, 3, 2, 0},
    {2, 0, 1, 3}, {2, 0, 3, 1}, {2, 1, 0, 3}, {2, 1, 3, 0}, {2, 3, 0, 1}, {2, 3, 1, 0},
    {3, 0, 1, 2}, {3, 0, 2, 1}, {3, 1, 0, 2}, {3, 1, 2, 0}, {3, 2, 0, 1}, {3, 2, 1, 0},
}};

double now_ms() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double, std::milli>(clock::now().time_since_epoch()).count();
}

} // namespace

std::vector<std::uint32_t> PlasSchedule::block_sizes() const {
    std::vector<std::uint32_t> sizes;
    for (std::uint32_t b = mbs; b >= 4; b /= 2) sizes.push_back(b);
    return sizes;
}

void PlasSchedule::validate(std::uint32_t side) const {
    const bool power_of_two = mbs != 0 && (mbs & (mbs - 1)) == 0;
    if (!power_of_two || mbs < 4 || mbs > 64) {
        throw ConfigError("mbs must be one of {4, 8, 16, 32, 64}, got " + std::to_string(mbs));
    }
    if (iterations_per_size < 1) throw ConfigError("iterations_per_size must be >= 1");
    if (side == 0 || side % mbs != 0) {
        throw ConfigError("mbs " + std::to_string(mbs) + " does not divide grid side " +
                          std::to_string(side));
    }
}

double smoothness_cost(const FeatureGrid& grid) {
    const std::uint32_t m = grid.side;
    if (m < 2) return 0.0;
    double total = 0.0;
    for (std::size_t c = 0; c < grid.channels.size(); ++c) {
        const float w = grid.weights[c];
        if (w == 0.0f) continue;
        const float* p = grid.channels[c].data();
        double acc = 0.0;
        for (std::uint32_t y = 0; y < m; ++y) {
            const float* row = p + std::size_t(y) * m;
            for (std::uint32_t x = 0; x + 1 < m; ++x) {
                const double d = double(row[x]) - double(row[x + 1]);
                acc += d * d;
            }
        }
        for (std::uint32_t y = 0; y + 1 < m; ++y) {
            const float* row = p + std::size_t(y) * m;
            const float* next = row + m;
            for (std::uint32_t x = 0; x < m; ++x) {
                const double d = double(row[x]) - double(next[x]);
                acc += d * d;
            }
        }
        total += w * acc;
    }
    const double pairs = 2.0 * m * (m - 1);
    return total / pairs;
}

FeatureGrid blur_target(const FeatureGrid& grid) {
    const std::uint32_t m = grid.side;
    FeatureGrid out;
    out.side = m;
    out.weights = grid.weights;
    out.channels.resize(grid.channels.size());

    for (std::size_t c = 0; c < grid.channels.size(); ++c) {
        const std::vector<float>& src = grid.channels[c];
        std::vector<float> tmp(src.size());
        std::vector<float>& dst = out.channels[c];
        dst.resize(src.size());
        // Separable 3-tap sums with clamped edges, then one divide by 9.
        for (std::uint32_t y = 0; y < m; ++y) {
            const float* row = src.data() + std::size_t(y) * m;
            float* t = tmp.data() + std::size_t(y) * m;
            for (std::uint32_t x = 0; x < m; ++x) {
                const std::uint32_t xl = x == 0 ? 0 : x - 1;
                const std::uint32_t xr = x + 1 == m ? x : x + 1;
                t[x] = row[xl] + row[x] + row[xr];
            }
        }
        for (std::uint32_t y = 0; y < m; ++y) {
            const std::uint32_t yu = y == 0 ? 0 : y - 1;
            const std::uint32_t yd = y + 1 == m ? y : y + 1;
            const float* up = tmp.data() + std::size_t(yu) * m;
            const float* mid = tmp.data() + std::size_t(y) * m;
            const float* down = tmp.data() + std::size_t(yd) * m;
            float* d = dst.data() + std::size_t(y) * m;
            for (std::uint32_t x = 0; x < m; ++x) {
                d[x] = (up[x] + mid[x] + down[x]) * (1.0f / 9.0f);
            }
        }
    }
    return out;
}

double target_cost(const FeatureGrid& grid, const FeatureGrid& target) {
    double total = 0.0;
    for (std::size_t c = 0; c < grid.channels.size(); ++c) {
        const float w = grid.weights[c];
        if (w == 0.0f) continue;
        const float* a = grid.channels[c].data();
        const float* b = target.channels[c].data();
        double acc = 0.0;
        for (std::size_t i = 0; i < grid.channels[c].size(); ++i) {
            const double d = double(a[i]) - double(b[i]);
            acc += d * d;
        }
        total += w * acc;
    }
    return total;
}

std::vector<std::uint32_t> block_grouping(std::uint32_t block_size, std::uint64_t seed,
                                          std::uint32_t pass_index, std::uint32_t block_x,
                                          std::uint32_t block_y) {
    std::vector<std::uint32_t> cells(std::size_t(block_size) * block_size);
    std::iota(cells.begin(), cells.end(), 0u);
    SplitMix64 rng(mix_seed(seed, pass_index, block_x, block_y));
    shuffle(cells.data(), cells.size(), rng);
    return cells;
}

PassOutcome optimize_pass(FeatureGrid& grid, GridLayout& layout, std::uint32_t block_size,
                          std::uint64_t seed, std::uint32_t pass_index, unsigned threads) {
    const std::uint32_t m = grid.side;
    if (block_size < 4 || m % block_size != 0) {
        throw ConfigError("block size " + std::to_string(block_size) + " does not divide side " +
                          std::to_string(m));
    }
    const FeatureGrid target = blur_target(grid);
    const std::uint32_t nb = m / block_size;
    const std::size_t channel_count = grid.channels.size();

    std::vector<double> block_delta(std::size_t(nb) * nb, 0.0);

    parallel_for(0, std::size_t(nb) * nb, threads, [&](std::size_t block) {
        const std::uint32_t bx = static_cast<std::uint32_t>(block % nb);
        const std::uint32_t by = static_cast<std::uint32_t>(block / nb);
        const auto cells = block_grouping(block_size, seed, pass_index, bx, by);

        std::array<std::size_t, 4> pix{};
        double cost[4][4];
        std::array<float, 4> tmp{};
        double delta = 0.0;

        for (std::size_t g = 0; g + 4 <= cells.size(); g += 4) {
            for (int i = 0; i < 4; ++i) {
                const std::uint32_t local = cells[g + i];
                const std::uint32_t x = bx * block_size + local % block_size;
                const std::uint32_t y = by * block_size + local / block_size;
                pix[i] = std::size_t(y) * m + x;
            }
            // cost[i][j]: weighted squared distance of features at pix[i]
            // to the blurred target at pix[j].
            for (int i = 0; i < 4; ++i) {
                for (int j = 0; j < 4; ++j) cost[i][j] = 0.0;
            }
            for (std::size_t c = 0; c < channel_count; ++c) {
                const float w = grid.weights[c];
                if (w == 0.0f) continue;
                const float* f = grid.channels[c].data();
                const float* t = target.channels[c].data();
                float fv[4], tv[4];
                for (int i = 0; i < 4; ++i) {
                    fv[i] = f[pix[i]];
                    tv[i] = t[pix[i]];
                }
                for (int i = 0; i < 4; ++i) {
                    for (int j = 0; j < 4; ++j) {
                        const double d = double(fv[i]) - double(tv[j]);
                        cost[i][j] += w * d * d;
                    }
                }
            }
            int best = 0;
            double best_cost = cost[0][0] + cost[1][1] + cost[2][2] + cost[3][3];
            const double identity_cost = best_cost;
            for (int p = 1; p < 24; ++p) {
                const auto& s = kPerm4[p];
                const double total =
                    cost[0][s[0]] + cost[1][s[1]] + cost[2][s[2]] + cost[3][s[3]];
                if (total < best_cost) {
                    best_cost = total;
                    best = p;
                }
            }
            if (best != 0) {
                const auto& s = kPerm4[best];
                for (std::size_t c = 0; c < channel_count; ++c) {
                    float* f = grid.channels[c].data();
                    for (int i = 0; i < 4; ++i) tmp[i] = f[pix[i]];
                    for (int i = 0; i < 4; ++i) f[pix[s[i]]] = tmp[i];
                }
                std::array<std::uint32_t, 4> ord{};
                for (int i = 0; i < 4; ++i) ord[i] = layout.order[pix[i]];
                for (int i = 0; i < 4; ++i) layout.order[pix[s[i]]] = ord[i];
                delta += best_cost - identity_cost;
            }
        }
        block_delta[block] = delta;
    });

    PassOutcome outcome;
    const std::uint64_t groups_per_block = std::uint64_t(block_size) * block_size / 4;
    outcome.op_count = std::uint64_t(nb) * nb * groups_per_block * 24;
    for (double d : block_delta) outcome.cost_delta += d;
    return outcome;
}

namespace {

// After the passes, padding cells may have drifted into scan ranks below
// n_real. Swap them with stray real cells so rank alone separates real
// primitives from padding again.
std::uint64_t restore_rank_invariant(FeatureGrid& grid, GridLayout& layout) {
    const std::uint64_t total = std::uint64_t(layout.side) * layout.side;
    std::vector<std::size_t> pad_low, real_high;
    for (std::uint64_t rank = 0; rank < total; ++rank) {
        const std::size_t cell = layout.raster_of_rank(rank);
        const bool padding = layout.order[cell] == kPaddingCell;
        if (rank < layout.n_real && padding) pad_low.push_back(cell);
        if (rank >= layout.n_real && !padding) real_high.push_back(cell);
    }
    for (std::size_t i = 0; i < pad_low.size(); ++i) {
        const std::size_t a = pad_low[i];
        const std::size_t b = real_high[i];
        std::swap(layout.order[a], layout.order[b]);
        for (auto& plane : grid.channels) std::swap(plane[a], plane[b]);
    }
    return pad_low.size();
}

} // namespace

MiniplasReport run_miniplas(FeatureGrid& grid, GridLayout& layout, const PlasSchedule& schedule,
                            unsigned threads) {
    schedule.validate(grid.side);
    if (layout.side != grid.side) throw ShapeError("run_miniplas: grid/layout side mismatch");

    MiniplasReport report;
    const double t0 = now_ms();
    report.smoothness_initial = smoothness_cost(grid);

    std::uint32_t pass_index = 0;
    for (std::uint32_t block_size : schedule.block_sizes()) {
        for (std::uint32_t it = 0; it < schedule.iterations_per_size; ++it) {
            PassReport pr;
            pr.block_size = block_size;
            pr.iteration = it;
            const double p0 = now_ms();
            const FeatureGrid target = blur_target(grid);
            pr.target_cost_before = target_cost(grid, target);
            const PassOutcome out =
                optimize_pass(grid, layout, block_size, schedule.seed, pass_index, threads);
            pr.target_cost_after = pr.target_cost_before + out.cost_delta;
            pr.op_count = out.op_count;
            pr.smoothness_after = smoothness_cost(grid);
            pr.millis = now_ms() - p0;
            report.passes.push_back(pr);
            ++pass_index;
        }
    }

    report.boundary_swaps = restore_rank_invariant(grid, layout);
    report.smoothness_final = smoothness_cost(grid);
    report.total_millis = now_ms() - t0;
    return report;
}

FeatureGrid build_feature_grid(const GaussianCloud& sorted_cloud, const AcCoefficients& coeffs,
                               const GridLayout& layout, const QuantizationParams& params,
                               const GroupWeights& weights) {
    const std::size_t n = sorted_cloud.count;
    if (layout.n_real != n) throw ShapeError("build_feature_grid: layout does not cover cloud");
    if (coeffs.coeffs.size() != n * coeffs.k) {
        throw ShapeError("build_feature_grid: coefficient matrix is not N x k");
    }

    struct Source {
        const std::vector<float>* data;
        std::size_t channels;
        const ChannelGroupParams* params;
        float weight;
    };
    const Source sources[] = {
        {&sorted_cloud.positions, kPositionChannels, &params.positions, weights.positions},
        {&sorted_cloud.sh_dc, kShDcChannels, &params.sh_dc, weights.sh_dc},
        {&coeffs.coeffs, coeffs.k, &params.ac, weights.ac},
        {&sorted_cloud.opacity, kOpacityChannels, &params.opacity, weights.opacity},
        {&sorted_cloud.scale, kScaleChannels, &params.scale, weights.scale},
        {&sorted_cloud.rotation, kRotationChannels, &params.rotation, weights.rotation},
    };

    FeatureGrid grid;
    grid.side = layout.side;
    const std::size_t cells = std::size_t(layout.side) * layout.side;
    std::uint32_t tail = layout.order[layout.raster_of_rank(layout.n_real - 1)];
    if (tail == kPaddingCell) tail = layout.n_real - 1;

    for (const Source& src : sources) {
        for (std::size_t ch = 0; ch < src.channels; ++ch) {
            const float lo = src.params->min[ch];
            const float hi = src.params->max[ch];
            const double span = hi > lo ? double(hi) - double(lo) : 1.0;
            std::vector<float> plane(cells);
            for (std::size_t cell = 0; cell < cells; ++cell) {
                std::uint32_t idx = layout.order[cell];
                if (idx == kPaddingCell) idx = tail;
                const float v = (*src.data)[std::size_t(idx) * src.channels + ch];
                plane[cell] = static_cast<float>((double(v) - double(lo)) / span);
            }
            grid.channels.push_back(std::move(plane));
            grid.weights.push_back(src.weight);
        }
    }
    return grid;
}

} // namespace gsmc
