#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gsmc/cloud.hpp"
#include "gsmc/codec.hpp"
#include "gsmc/container.hpp"
#include "gsmc/miniplas.hpp"
#include "gsmc/pca.hpp"

namespace gsmc {

struct EncodeConfig {
    std::uint32_t k = 12;
    PcaMode mode = PcaMode::joint;
    std::uint32_t mbs = 4; // 0 skips the layout refinement
    std::uint32_t iterations = 1;
    std::uint64_t seed = 0;
    int qp = 0; // attribute-image qp; 0 = everything lossless
    std::string backend_config; // path to external codec JSON; empty = env/internal
    GroupWeights weights;
    unsigned threads = 0; // 0 = all hardware threads
};

struct StageTiming {
    std::string name;
    double millis = 0.0;
};

// Map-generation times in the four-stage shape used for reporting:
// 3D Morton sort, 2D Morton layout, PCA, MiniPLAS, and their sum.
struct MapGenTiming {
    double morton3_ms = 0.0;
    double morton2_ms = 0.0;
    double pca_ms = 0.0;
    double miniplas_ms = 0.0;

    double all_ms() const { return morton3_ms + morton2_ms + pca_ms + miniplas_ms; }
};

struct EncodeReport {
    std::uint64_t count = 0;
    std::uint32_t side = 0;
    std::uint32_t k = 0;
    PcaMode mode = PcaMode::joint;
    std::string backend_id;
    MapGenTiming mapgen;
    std::vector<StageTiming> stages; // every stage, in execution order
    MiniplasReport miniplas;
    std::vector<float> evr;
    BitrateReport bitrate;
    double total_millis = 0.0;
};

// Full encode of an in-memory cloud to a container file.
EncodeReport encode_cloud(const GaussianCloud& cloud, const EncodeConfig& config,
                          const std::string& container_path);

// load_cloud + encode_cloud with the load stage timed.
EncodeReport cmd_encode(const std::string& input_ply, const EncodeConfig& config,
                        const std::string& container_path);

struct DecodeReport {
    std::uint64_t count = 0;
    std::uint32_t side = 0;
    std::uint32_t k = 0;
    std::string backend_id;
    double total_millis = 0.0;
};

GaussianCloud decode_container(const std::string& container_path, const std::string& backend_config,
                               unsigned threads, DecodeReport* report = nullptr);

// decode_container + save_cloud; writes nothing on failure.
DecodeReport cmd_decode(const std::string& container_path, const std::string& output_ply,
                        const std::string& backend_config = {}, unsigned threads = 0);

} // namespace gsmc
