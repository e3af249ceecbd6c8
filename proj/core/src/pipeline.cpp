#include "gsmc/pipeline.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>

#include "gsmc/error.hpp"
#include "gsmc/maps.hpp"
#include "gsmc/morton.hpp"
#include "gsmc/parallel.hpp"
#include "gsmc/ply_io.hpp"
#include "gsmc/quantize.hpp"

namespace gsmc {

namespace {

class StageClock {
public:
    explicit StageClock(std::vector<StageTiming>& stages) : stages_(stages) {}

    template <typename Fn>
    double time(const std::string& name, Fn&& fn) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        const double ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                .count();
        stages_.push_back({name, ms});
        return ms;
    }

private:
    std::vector<StageTiming>& stages_;
};

std::vector<float> permute_rows(const std::vector<float>& rows, std::size_t width,
                                const std::vector<std::uint32_t>& perm) {
    std::vector<float> out(rows.size());
    for (std::size_t i = 0; i < perm.size(); ++i) {
        const float* src = rows.data() + std::size_t(perm[i]) * width;
        std::copy(src, src + width, out.data() + i * width);
    }
    return out;
}

} // namespace

EncodeReport encode_cloud(const GaussianCloud& cloud, const EncodeConfig& config,
                          const std::string& container_path) {
    cloud.validate();
    const auto start = std::chrono::steady_clock::now();

    EncodeReport report;
    report.count = cloud.count;
    report.k = config.k;
    StageClock clock(report.stages);

    const CodecBackend backend = resolve_backend(config.backend_config);
    report.backend_id = backend.id();

    // Clouds too small for covariance estimation fall back to the fixed
    // reordering so single-primitive inputs still encode.
    PcaMode mode = config.mode;
    if (cloud.count < 2) mode = PcaMode::order_clip;
    report.mode = mode;

    PcaModel model;
    AcCoefficients coeffs;
    report.mapgen.pca_ms = clock.time("pca", [&] {
        model = fit_pca(cloud.sh_ac, cloud.count, mode);
        coeffs = project(model, cloud.sh_ac, cloud.count, config.k);
    });
    report.evr = model.evr;

    QuantizationParams params;
    clock.time("ranges", [&] { params = compute_ranges(cloud, coeffs.coeffs, coeffs.k); });

    GaussianCloud sorted;
    report.mapgen.morton3_ms = clock.time("morton3_sort", [&] {
        const std::vector<std::uint32_t> perm = sort_by_morton(cloud, params);
        sorted = apply_permutation(cloud, perm);
        coeffs.coeffs = permute_rows(coeffs.coeffs, coeffs.k, perm);
    });

    GridLayout layout;
    report.mapgen.morton2_ms =
        clock.time("morton2_layout", [&] { layout = build_layout(sorted.count); });
    report.side = layout.side;

    report.mapgen.miniplas_ms = clock.time("miniplas", [&] {
        const std::uint32_t mbs = std::min<std::uint32_t>(config.mbs, layout.side);
        if (config.mbs == 0 || mbs < 4) return; // refinement skipped on tiny grids
        FeatureGrid grid = build_feature_grid(sorted, coeffs, layout, params, config.weights);
        PlasSchedule schedule;
        schedule.mbs = mbs;
        schedule.iterations_per_size = config.iterations;
        schedule.seed = config.seed;
        report.miniplas = run_miniplas(grid, layout, schedule, resolve_threads(config.threads));
    });

    AttributeMapSet maps;
    clock.time("assemble", [&] { maps = assemble(sorted, coeffs, layout, params); });

    Manifest manifest;
    manifest.n_real = layout.n_real;
    manifest.side = layout.side;
    manifest.k = config.k;
    manifest.backend_id = backend.id();
    manifest.params = params;
    manifest.pca_blob = serialize_model(model, config.k);
    if (config.mbs != 0 && std::min<std::uint32_t>(config.mbs, layout.side) >= 4) {
        manifest.schedule = {std::min<std::uint32_t>(config.mbs, layout.side), config.iterations,
                             config.seed};
    }

    std::vector<std::vector<std::uint8_t>> blocks(maps.images.size());
    clock.time("encode_images", [&] {
        manifest.entries.resize(maps.images.size());
        for (std::size_t i = 0; i < maps.images.size(); ++i) {
            const AttributeImage& img = maps.images[i];
            const bool coord = img.tag == "coord_hi" || img.tag == "coord_lo";
            ImageEntry& e = manifest.entries[i];
            e.tag = img.tag;
            e.lossless = coord || config.qp == 0;
            e.qp = e.lossless ? 0 : config.qp;
        }
        parallel_for(0, maps.images.size(), resolve_threads(config.threads), [&](std::size_t i) {
            const ImageEntry& e = manifest.entries[i];
            blocks[i] = backend.encode_image(maps.images[i], e.lossless, e.qp);
        });
    });

    clock.time("pack", [&] { pack_container(manifest, blocks, container_path); });

    report.bitrate = bitrate_report({manifest, blocks});
    report.total_millis =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return report;
}

EncodeReport cmd_encode(const std::string& input_ply, const EncodeConfig& config,
                        const std::string& container_path) {
    const auto t0 = std::chrono::steady_clock::now();
    const GaussianCloud cloud = load_cloud(input_ply);
    const double load_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    EncodeReport report = encode_cloud(cloud, config, container_path);
    report.stages.insert(report.stages.begin(), {"load", load_ms});
    report.total_millis += load_ms;
    return report;
}

GaussianCloud decode_container(const std::string& container_path, const std::string& backend_config,
                               unsigned threads, DecodeReport* report) {
    const auto start = std::chrono::steady_clock::now();
    const Container container = unpack_container(container_path);
    const Manifest& m = container.manifest;

    CodecBackend backend = resolve_backend(backend_config);
    if (backend.id() != m.backend_id) {
        if (m.backend_id == "internal") {
            backend = CodecBackend::internal();
        } else {
            throw BackendError("container was encoded with backend '" + m.backend_id +
                               "' but '" + backend.id() + "' is configured");
        }
    }

    AttributeMapSet maps;
    maps.side = m.side;
    maps.n_real = static_cast<std::uint32_t>(m.n_real);
    maps.images.resize(m.entries.size());
    parallel_for(0, m.entries.size(), resolve_threads(threads), [&](std::size_t i) {
        const ImageEntry& e = m.entries[i];
        maps.images[i] = backend.decode_image(container.blocks[i], e.tag, m.side, e.lossless, e.qp);
    });

    const PcaModel model = parse_model(m.pca_blob);
    GaussianCloud cloud = disassemble(maps, m.params, model);
    if (report != nullptr) {
        report->count = m.n_real;
        report->side = m.side;
        report->k = m.k;
        report->backend_id = backend.id();
        report->total_millis =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                .count();
    }
    return cloud;
}

DecodeReport cmd_decode(const std::string& container_path, const std::string& output_ply,
                        const std::string& backend_config, unsigned threads) {
    DecodeReport report;
    const GaussianCloud cloud = decode_container(container_path, backend_config, threads, &report);
    // Write via a temp name so a failed decode never leaves partial output.
    const std::string tmp = output_ply + ".tmp";
    save_cloud(cloud, tmp);
    std::error_code ec;
    std::filesystem::rename(tmp, output_ply, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot move decoded cloud into place: " + output_ply);
    }
    return report;
}

} // namespace gsmc
