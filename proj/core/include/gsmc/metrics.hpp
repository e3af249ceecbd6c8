#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gsmc/cloud.hpp"
#include "gsmc/pca.hpp"
#include "gsmc/pipeline.hpp"

namespace gsmc {

struct GroupStats {
    std::string name;
    double psnr = 0.0; // dB; +infinity when the group matches exactly
    double max_error = 0.0;
    double peak = 0.0; // channel range used as the PSNR peak
};

struct CompareReport {
    std::uint64_t matched = 0;
    std::uint64_t ambiguous = 0; // pairs matched by Morton-rank fallback
    std::vector<GroupStats> groups;
    // Pooled range-normalized PSNR over every non-position channel; the
    // scalar used for qp-sweep ordering.
    double attribute_psnr = 0.0;
};

// Pairs primitives of two same-size clouds by 20-bit quantized position
// over their union bounding box (decode reorders primitives, so index
// order is meaningless). Duplicate quantized positions fall back to
// Morton-rank pairing and are counted as ambiguous.
CompareReport compare_clouds(const GaussianCloud& reference, const GaussianCloud& decoded);

struct LayoutStudyRow {
    std::string layout;
    double smoothness = 0.0;
    std::uint64_t bytes = 0; // internal-lossless coded bytes of all images
};

struct EvrCurve {
    std::string mode;
    std::vector<float> evr;
};

struct AnalyzeReport {
    std::uint64_t count = 0;
    std::uint32_t side = 0;
    std::vector<LayoutStudyRow> rows; // random, row_major, morton2, morton2+miniplas
    std::vector<EvrCurve> curves;
};

// Layout ablation on one cloud: smoothness and internal-lossless size for
// a seeded-random layout, row-major placement, the 2D Morton placement,
// and Morton + MiniPLAS refinement; plus explained-variance curves for
// all three reduction modes.
AnalyzeReport analyze_cloud(const GaussianCloud& cloud, const EncodeConfig& config);

} // namespace gsmc
