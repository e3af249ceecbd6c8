#include "gsmc/synthetic.hpp"

#include <cmath>
#include <vector>

#include "gsmc/error.hpp"
#include "gsmc/rng.hpp"

namespace gsmc {

namespace {

// Smooth scalar field over position: a few low-frequency sinusoids with
// fixed per-field parameters.
struct Field {
    static constexpr int kWaves = 3;
    double kx[kWaves], ky[kWaves], kz[kWaves], phase[kWaves], amp[kWaves];

    static Field draw(SplitMix64& rng, double box, double scale, double freq_mul) {
        Field f;
        for (int w = 0; w < kWaves; ++w) {
            const double freq = freq_mul * rng.uniform(0.4, 1.6) / box;
            f.kx[w] = freq * rng.uniform(-1.0, 1.0);
            f.ky[w] = freq * rng.uniform(-1.0, 1.0);
            f.kz[w] = freq * rng.uniform(-1.0, 1.0);
            f.phase[w] = rng.uniform(0.0, 6.283185307179586);
            f.amp[w] = scale * rng.uniform(0.3, 1.0) / kWaves;
        }
        return f;
    }

    double at(double x, double y, double z) const {
        double v = 0.0;
        for (int w = 0; w < kWaves; ++w) {
            v += amp[w] * std::sin(kx[w] * x + ky[w] * y + kz[w] * z + phase[w]);
        }
        return v;
    }
};

} // namespace

GaussianCloud generate_cloud(const SyntheticConfig& config) {
    if (config.count == 0) throw ConfigError("synthetic cloud needs count >= 1");
    if (config.clusters == 0) throw ConfigError("synthetic cloud needs clusters >= 1");
    const std::uint32_t rank = std::min<std::uint32_t>(std::max<std::uint32_t>(config.ac_rank, 1),
                                                       kShAcChannels);

    SplitMix64 rng(mix_seed(config.seed, 0x67656e));

    struct Cluster {
        double cx, cy, cz, sigma;
        double dc_off[3], scale_off[3], rot_off[4], opacity_off;
        std::vector<double> latent_off;
    };
    std::vector<Cluster> clusters(config.clusters);
    for (Cluster& c : clusters) {
        c.cx = rng.uniform(-config.box, config.box);
        c.cy = rng.uniform(-config.box, config.box);
        c.cz = rng.uniform(-config.box, config.box);
        c.sigma = config.box * config.cluster_spread * rng.uniform(0.5, 1.5);
        const double ca = config.cluster_attr;
        for (double& v : c.dc_off) v = ca * rng.normal();
        for (double& v : c.scale_off) v = ca * rng.normal();
        for (double& v : c.rot_off) v = ca * rng.normal();
        c.opacity_off = ca * rng.normal();
        c.latent_off.resize(rank);
        for (double& v : c.latent_off) v = ca * rng.normal();
    }

    const double box = config.box;
    const double fm = config.field_freq;
    Field dc[3], latent_field[kShAcChannels], scale_f[3], rot_f[4], opacity_f;
    for (auto& f : dc) f = Field::draw(rng, box, 1.2, fm);
    for (std::uint32_t r = 0; r < rank; ++r) latent_field[r] = Field::draw(rng, box, 1.0, fm);
    for (auto& f : scale_f) f = Field::draw(rng, box, 0.8, fm);
    for (auto& f : rot_f) f = Field::draw(rng, box, 0.7, fm);
    opacity_f = Field::draw(rng, box, 2.0, fm);

    // Fixed mixing of the latent fields into the 45 AC channels.
    std::vector<double> mix(std::size_t(rank) * kShAcChannels);
    for (double& m : mix) m = rng.normal() / std::sqrt(double(rank));

    GaussianCloud cloud = GaussianCloud::zeros(config.count);
    std::vector<double> latent(rank);
    for (std::size_t i = 0; i < config.count; ++i) {
        const Cluster& c = clusters[rng.below(config.clusters)];
        const double x = c.cx + c.sigma * rng.normal();
        const double y = c.cy + c.sigma * rng.normal();
        const double z = c.cz + c.sigma * rng.normal();
        cloud.positions[i * 3 + 0] = static_cast<float>(x);
        cloud.positions[i * 3 + 1] = static_cast<float>(y);
        cloud.positions[i * 3 + 2] = static_cast<float>(z);

        const double an = config.attr_noise;
        for (int ch = 0; ch < 3; ++ch) {
            cloud.sh_dc[i * 3 + ch] =
                static_cast<float>(dc[ch].at(x, y, z) + c.dc_off[ch] + an * rng.normal());
            cloud.scale[i * 3 + ch] = static_cast<float>(-4.5 + scale_f[ch].at(x, y, z) +
                                                         c.scale_off[ch] + an * rng.normal());
        }
        for (int ch = 0; ch < 4; ++ch) {
            cloud.rotation[i * 4 + ch] = static_cast<float>(
                (ch == 0 ? 0.8 : 0.0) + rot_f[ch].at(x, y, z) + c.rot_off[ch] + an * rng.normal());
        }
        cloud.opacity[i] =
            static_cast<float>(opacity_f.at(x, y, z) + c.opacity_off + an * rng.normal());

        for (std::uint32_t r = 0; r < rank; ++r) {
            latent[r] = latent_field[r].at(x, y, z) + c.latent_off[r];
        }
        for (std::size_t ch = 0; ch < kShAcChannels; ++ch) {
            double v = 0.0;
            for (std::uint32_t r = 0; r < rank; ++r) v += latent[r] * mix[r * kShAcChannels + ch];
            v += config.ac_noise * rng.normal();
            cloud.sh_ac[i * kShAcChannels + ch] = static_cast<float>(v);
        }
    }
    return cloud;
}

} // namespace gsmc
