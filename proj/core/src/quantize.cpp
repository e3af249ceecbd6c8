#include "gsmc/quantize.hpp"

#include <algorithm>
#include <limits>

namespace gsmc {

namespace {

ChannelGroupParams scan_group(const std::vector<float>& data, std::size_t channels,
                              std::size_t n, int bits) {
    ChannelGroupParams p;
    p.bits = bits;
    p.min.assign(channels, std::numeric_limits<float>::max());
    p.max.assign(channels, std::numeric_limits<float>::lowest());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < channels; ++c) {
            const float v = data[i * channels + c];
            p.min[c] = std::min(p.min[c], v);
            p.max[c] = std::max(p.max[c], v);
        }
    }
    return p;
}

} // namespace

QuantizationParams compute_ranges(const GaussianCloud& cloud, const std::vector<float>& ac,
                                  std::size_t k) {
    const std::size_t n = cloud.count;
    if (n == 0) throw DataError("compute_ranges: empty cloud");
    if (ac.size() != n * k) throw ShapeError("compute_ranges: coefficient matrix is not N x k");

    QuantizationParams qp;
    qp.positions = scan_group(cloud.positions, kPositionChannels, n, kCoordBits);
    float lo = *std::min_element(qp.positions.min.begin(), qp.positions.min.end());
    float hi = *std::max_element(qp.positions.max.begin(), qp.positions.max.end());
    qp.positions.min.assign(kPositionChannels, lo);
    qp.positions.max.assign(kPositionChannels, hi);

    qp.sh_dc = scan_group(cloud.sh_dc, kShDcChannels, n, kAttributeBits);
    qp.ac = scan_group(ac, k, n, kAttributeBits);
    qp.opacity = scan_group(cloud.opacity, kOpacityChannels, n, kAttributeBits);
    qp.scale = scan_group(cloud.scale, kScaleChannels, n, kAttributeBits);
    qp.rotation = scan_group(cloud.rotation, kRotationChannels, n, kAttributeBits);
    return qp;
}

} // namespace gsmc
