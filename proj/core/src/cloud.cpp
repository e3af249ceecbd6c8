#include "gsmc/cloud.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <numeric>
#include <string>

#include "gsmc/error.hpp"

namespace gsmc {

GaussianCloud GaussianCloud::zeros(std::size_t n) {
    GaussianCloud c;
    c.count = n;
    c.positions.assign(n * kPositionChannels, 0.0f);
    c.sh_dc.assign(n * kShDcChannels, 0.0f);
    c.sh_ac.assign(n * kShAcChannels, 0.0f);
    c.opacity.assign(n * kOpacityChannels, 0.0f);
    c.scale.assign(n * kScaleChannels, 0.0f);
    c.rotation.assign(n * kRotationChannels, 0.0f);
    return c;
}

namespace {

struct ArrayRef {
    const char* name;
    const std::vector<float>* data;
    std::size_t channels;
};

std::array<ArrayRef, 6> arrays_of(const GaussianCloud& c) {
    return {{{"positions", &c.positions, kPositionChannels},
             {"sh_dc", &c.sh_dc, kShDcChannels},
             {"sh_ac", &c.sh_ac, kShAcChannels},
             {"opacity", &c.opacity, kOpacityChannels},
             {"scale", &c.scale, kScaleChannels},
             {"rotation", &c.rotation, kRotationChannels}}};
}

} // namespace

void GaussianCloud::validate() const {
    if (count < 1) throw DataError("cloud is empty");
    for (const auto& a : arrays_of(*this)) {
        if (a.data->size() != count * a.channels) {
            throw DataError(std::string(a.name) + " array has wrong size");
        }
        for (std::size_t i = 0; i < a.data->size(); ++i) {
            if (!std::isfinite((*a.data)[i])) {
                throw DataError("non-finite value in " + std::string(a.name) +
                                " at primitive " + std::to_string(i / a.channels));
            }
        }
    }
}

namespace {

void gather(const std::vector<float>& src, std::size_t channels,
            const std::vector<std::uint32_t>& perm, std::vector<float>& dst) {
    dst.resize(src.size());
    for (std::size_t i = 0; i < perm.size(); ++i) {
        std::memcpy(dst.data() + i * channels, src.data() + perm[i] * channels,
                    channels * sizeof(float));
    }
}

} // namespace

GaussianCloud apply_permutation(const GaussianCloud& cloud,
                                const std::vector<std::uint32_t>& perm) {
    if (perm.size() != cloud.count) throw ShapeError("permutation size != primitive count");
    GaussianCloud out;
    out.count = cloud.count;
    gather(cloud.positions, kPositionChannels, perm, out.positions);
    gather(cloud.sh_dc, kShDcChannels, perm, out.sh_dc);
    gather(cloud.sh_ac, kShAcChannels, perm, out.sh_ac);
    gather(cloud.opacity, kOpacityChannels, perm, out.opacity);
    gather(cloud.scale, kScaleChannels, perm, out.scale);
    gather(cloud.rotation, kRotationChannels, perm, out.rotation);
    return out;
}

GaussianCloud canonical_order(const GaussianCloud& cloud) {
    std::vector<std::array<std::uint32_t, kTotalChannels>> rows(cloud.count);
    for (std::size_t i = 0; i < cloud.count; ++i) {
        std::size_t k = 0;
        auto put = [&](const std::vector<float>& v, std::size_t c) {
            for (std::size_t j = 0; j < c; ++j) {
                std::uint32_t bits;
                std::memcpy(&bits, &v[i * c + j], sizeof(bits));
                rows[i][k++] = bits;
            }
        };
        put(cloud.positions, kPositionChannels);
        put(cloud.sh_dc, kShDcChannels);
        put(cloud.sh_ac, kShAcChannels);
        put(cloud.opacity, kOpacityChannels);
        put(cloud.scale, kScaleChannels);
        put(cloud.rotation, kRotationChannels);
    }
    std::vector<std::uint32_t> idx(cloud.count);
    std::iota(idx.begin(), idx.end(), 0u);
    std::sort(idx.begin(), idx.end(),
              [&](std::uint32_t a, std::uint32_t b) { return rows[a] < rows[b]; });
    return apply_permutation(cloud, idx);
}

} // namespace gsmc
