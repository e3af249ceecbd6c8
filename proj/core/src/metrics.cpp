#include "gsmc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "gsmc/codec.hpp"
#include "gsmc/error.hpp"
#include "gsmc/maps.hpp"
#include "gsmc/miniplas.hpp"
#include "gsmc/morton.hpp"
#include "gsmc/parallel.hpp"
#include "gsmc/quantize.hpp"
#include "gsmc/rng.hpp"

namespace gsmc {

namespace {

// Union cubic position box of both clouds, mirroring the encoder's shared
// 3-axis range so decoded grid points re-quantize to their exact codes.
std::pair<float, float> union_box(const GaussianCloud& a, const GaussianCloud& b) {
    float lo = std::numeric_limits<float>::max();
    float hi = std::numeric_limits<float>::lowest();
    for (const GaussianCloud* c : {&a, &b}) {
        for (float v : c->positions) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    return {lo, hi};
}

std::vector<std::uint64_t> position_codes(const GaussianCloud& c, float lo, float hi) {
    std::vector<std::uint64_t> codes(c.count);
    for (std::size_t i = 0; i < c.count; ++i) {
        const std::uint32_t x = quantize_value(c.positions[i * 3 + 0], lo, hi, kCoordBits);
        const std::uint32_t y = quantize_value(c.positions[i * 3 + 1], lo, hi, kCoordBits);
        const std::uint32_t z = quantize_value(c.positions[i * 3 + 2], lo, hi, kCoordBits);
        codes[i] = morton3_encode(x, y, z);
    }
    return codes;
}

struct GroupView {
    const char* name;
    const std::vector<float>* a;
    const std::vector<float>* b;
    std::size_t channels;
    bool positional;
};

} // namespace

CompareReport compare_clouds(const GaussianCloud& reference, const GaussianCloud& decoded) {
    reference.validate();
    decoded.validate();
    if (reference.count != decoded.count) {
        throw DataError("cannot compare clouds of " + std::to_string(reference.count) + " and " +
                        std::to_string(decoded.count) + " primitives");
    }
    const std::size_t n = reference.count;
    const auto [lo, hi] = union_box(reference, decoded);
    const std::vector<std::uint64_t> ref_codes = position_codes(reference, lo, hi);
    const std::vector<std::uint64_t> dec_codes = position_codes(decoded, lo, hi);

    // Exact-code buckets; anything unresolved is paired in Morton order.
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> buckets;
    buckets.reserve(n * 2);
    for (std::size_t i = 0; i < n; ++i) {
        buckets[dec_codes[i]].push_back(static_cast<std::uint32_t>(i));
    }

    CompareReport report;
    std::vector<std::uint32_t> match(n); // reference index -> decoded index
    std::vector<std::uint32_t> leftover_ref;
    for (std::size_t i = 0; i < n; ++i) {
        auto it = buckets.find(ref_codes[i]);
        if (it != buckets.end() && !it->second.empty()) {
            if (it->second.size() > 1) ++report.ambiguous;
            match[i] = it->second.back();
            it->second.pop_back();
        } else {
            leftover_ref.push_back(static_cast<std::uint32_t>(i));
        }
    }
    if (!leftover_ref.empty()) {
        std::vector<std::uint32_t> leftover_dec;
        for (auto& [code, list] : buckets) {
            for (std::uint32_t i : list) leftover_dec.push_back(i);
        }
        const auto by_code = [](const std::vector<std::uint64_t>& codes) {
            return [&codes](std::uint32_t x, std::uint32_t y) {
                return codes[x] != codes[y] ? codes[x] < codes[y] : x < y;
            };
        };
        std::sort(leftover_ref.begin(), leftover_ref.end(), by_code(ref_codes));
        std::sort(leftover_dec.begin(), leftover_dec.end(), by_code(dec_codes));
        for (std::size_t i = 0; i < leftover_ref.size(); ++i) {
            match[leftover_ref[i]] = leftover_dec[i];
        }
        report.ambiguous += leftover_ref.size();
    }
    report.matched = n;

    const GroupView groups[] = {
        {"positions", &reference.positions, &decoded.positions, 3, true},
        {"sh_dc", &reference.sh_dc, &decoded.sh_dc, 3, false},
        {"sh_ac", &reference.sh_ac, &decoded.sh_ac, kShAcChannels, false},
        {"opacity", &reference.opacity, &decoded.opacity, 1, false},
        {"scale", &reference.scale, &decoded.scale, 3, false},
        {"rotation", &reference.rotation, &decoded.rotation, 4, false},
    };

    double pooled_sq = 0.0;
    std::uint64_t pooled_n = 0;
    for (const GroupView& g : groups) {
        GroupStats stats;
        stats.name = g.name;
        std::vector<double> range(g.channels, 0.0);
        for (std::size_t ch = 0; ch < g.channels; ++ch) {
            float cmin = std::numeric_limits<float>::max();
            float cmax = std::numeric_limits<float>::lowest();
            for (std::size_t i = 0; i < n; ++i) {
                cmin = std::min(cmin, (*g.a)[i * g.channels + ch]);
                cmax = std::max(cmax, (*g.a)[i * g.channels + ch]);
            }
            range[ch] = double(cmax) - double(cmin);
            stats.peak = std::max(stats.peak, range[ch]);
        }
        double sq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t j = match[i];
            for (std::size_t ch = 0; ch < g.channels; ++ch) {
                const double d =
                    double((*g.a)[i * g.channels + ch]) - double((*g.b)[j * g.channels + ch]);
                sq += d * d;
                stats.max_error = std::max(stats.max_error, std::abs(d));
                if (!g.positional && range[ch] > 0.0) {
                    const double nd = d / range[ch];
                    pooled_sq += nd * nd;
                    ++pooled_n;
                }
            }
        }
        const double mse = sq / (double(n) * double(g.channels));
        if (mse == 0.0) {
            stats.psnr = std::numeric_limits<double>::infinity();
        } else if (stats.peak > 0.0) {
            stats.psnr = 10.0 * std::log10(stats.peak * stats.peak / mse);
        } else {
            stats.psnr = -std::numeric_limits<double>::infinity();
        }
        report.groups.push_back(std::move(stats));
    }
    if (pooled_n == 0 || pooled_sq == 0.0) {
        report.attribute_psnr = std::numeric_limits<double>::infinity();
    } else {
        report.attribute_psnr = 10.0 * std::log10(double(pooled_n) / pooled_sq);
    }
    return report;
}

namespace {

std::uint64_t coded_bytes(const GaussianCloud& sorted, const AcCoefficients& coeffs,
                          const GridLayout& layout, const QuantizationParams& params,
                          unsigned threads) {
    const AttributeMapSet maps = assemble(sorted, coeffs, layout, params);
    const CodecBackend backend = CodecBackend::internal();
    std::vector<std::uint64_t> sizes(maps.images.size());
    parallel_for(0, maps.images.size(), threads, [&](std::size_t i) {
        sizes[i] = backend.encode_image(maps.images[i], true, 0).size();
    });
    std::uint64_t total = 0;
    for (std::uint64_t s : sizes) total += s;
    return total;
}

} // namespace

AnalyzeReport analyze_cloud(const GaussianCloud& cloud, const EncodeConfig& config) {
    cloud.validate();
    const unsigned threads = resolve_threads(config.threads);

    AnalyzeReport report;
    report.count = cloud.count;

    for (const PcaMode mode : {PcaMode::joint, PcaMode::per_color, PcaMode::order_clip}) {
        if (cloud.count < 2 && mode != PcaMode::order_clip) continue;
        const PcaModel m = fit_pca(cloud.sh_ac, cloud.count, mode);
        report.curves.push_back({pca_mode_name(mode), m.evr});
    }

    const PcaMode mode = cloud.count < 2 ? PcaMode::order_clip : config.mode;
    const PcaModel model = fit_pca(cloud.sh_ac, cloud.count, mode);
    AcCoefficients coeffs = project(model, cloud.sh_ac, cloud.count, config.k);
    const QuantizationParams params = compute_ranges(cloud, coeffs.coeffs, coeffs.k);

    const std::vector<std::uint32_t> perm = sort_by_morton(cloud, params);
    const GaussianCloud sorted = apply_permutation(cloud, perm);
    {
        std::vector<float> permuted(coeffs.coeffs.size());
        for (std::size_t i = 0; i < perm.size(); ++i) {
            std::copy_n(coeffs.coeffs.begin() + std::size_t(perm[i]) * coeffs.k, coeffs.k,
                        permuted.begin() + i * coeffs.k);
        }
        coeffs.coeffs = std::move(permuted);
    }

    const GridLayout morton = build_layout(sorted.count);
    report.side = morton.side;
    const std::uint64_t cells = std::uint64_t(morton.side) * morton.side;

    GridLayout random = morton;
    {
        std::vector<std::uint32_t> ranks(morton.n_real);
        for (std::uint32_t i = 0; i < morton.n_real; ++i) ranks[i] = i;
        SplitMix64 rng(mix_seed(config.seed, 0x72616e64));
        shuffle(ranks.data(), ranks.size(), rng);
        for (std::uint64_t r = 0; r < morton.n_real; ++r) {
            random.order[random.raster_of_rank(r)] = ranks[r];
        }
    }

    GridLayout row_major = morton;
    for (std::uint64_t cell = 0; cell < cells; ++cell) {
        row_major.order[cell] =
            cell < morton.n_real ? static_cast<std::uint32_t>(cell) : kPaddingCell;
    }

    const auto study = [&](const std::string& name, const GridLayout& layout) {
        LayoutStudyRow row;
        row.layout = name;
        row.smoothness = smoothness_cost(build_feature_grid(sorted, coeffs, layout, params,
                                                            config.weights));
        row.bytes = coded_bytes(sorted, coeffs, layout, params, threads);
        return row;
    };
    report.rows.push_back(study("random", random));
    report.rows.push_back(study("row_major", row_major));
    report.rows.push_back(study("morton2", morton));

    {
        GridLayout refined = morton;
        LayoutStudyRow row;
        const std::uint32_t mbs = std::min<std::uint32_t>(config.mbs, refined.side);
        if (config.mbs != 0 && mbs >= 4) {
            FeatureGrid grid = build_feature_grid(sorted, coeffs, refined, params, config.weights);
            PlasSchedule schedule{mbs, config.iterations, config.seed};
            run_miniplas(grid, refined, schedule, threads);
            row.layout = "morton2+miniplas" + std::to_string(mbs);
            row.smoothness = smoothness_cost(grid);
        } else {
            row.layout = "morton2+miniplas(skipped)";
            row.smoothness = report.rows.back().smoothness;
        }
        row.bytes = coded_bytes(sorted, coeffs, refined, params, threads);
        report.rows.push_back(row);
    }
    return report;
}

} // namespace gsmc
