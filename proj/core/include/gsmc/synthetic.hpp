#pragma once

#include <cstdint>

#include "gsmc/cloud.hpp"

namespace gsmc {

// Deterministic synthetic scene: positions drawn from a clustered Gaussian
// mixture, attributes from smooth low-frequency fields of position, SH AC
// from a low-rank latent expansion plus a little noise. Same (config) ->
// bit-identical cloud on every platform.
struct SyntheticConfig {
    std::size_t count = 100000;
    std::uint64_t seed = 1;
    std::uint32_t clusters = 30;
    float box = 10.0f;            // cluster centers span [-box, box]^3
    float cluster_spread = 0.25f; // cluster sigma as a fraction of box
    std::uint32_t ac_rank = 8;    // latent dimension behind the 45 AC channels
    float ac_noise = 0.01f;
    float attr_noise = 0.02f; // per-primitive noise on the non-AC attribute fields
    float field_freq = 1.0f;  // spatial frequency multiplier of the attribute fields
    // Per-cluster attribute offset scale. Overlapping clusters with distinct
    // appearance interleave in scan order the way separate surfaces do in
    // real scenes.
    float cluster_attr = 1.0f;
};

GaussianCloud generate_cloud(const SyntheticConfig& config);

} // namespace gsmc
