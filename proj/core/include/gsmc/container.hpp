#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gsmc/quantize.hpp"

namespace gsmc {

inline constexpr std::uint32_t kContainerVersion = 1;

struct ImageEntry {
    std::string tag;
    bool lossless = true;
    int qp = 0; // dropped low bits when lossy; must be 0 when lossless
    std::uint64_t offset = 0; // relative to the start of the blocks region
    std::uint64_t length = 0;

    bool operator==(const ImageEntry&) const = default;
};

// MiniPLAS settings used at encode time; carried for reporting only.
struct ScheduleRecord {
    std::uint32_t mbs = 0; // 0 = refinement skipped
    std::uint32_t iterations = 0;
    std::uint64_t seed = 0;

    bool operator==(const ScheduleRecord&) const = default;
};

struct Manifest {
    std::uint32_t version = kContainerVersion;
    std::uint64_t n_real = 0;
    std::uint32_t side = 0;
    std::uint32_t k = 0;
    std::string backend_id = "internal";
    QuantizationParams params;
    std::vector<std::uint8_t> pca_blob; // serialize_model bytes
    ScheduleRecord schedule;
    std::vector<ImageEntry> entries;

    bool operator==(const Manifest&) const = default;
};

// Canonical JSON text: sorted keys, shortest-roundtrip numbers, PCA
// metadata hex-encoded. Byte-reproducible for equal manifests.
std::string manifest_to_json(const Manifest& manifest);
Manifest manifest_from_json(const std::string& text);

struct Container {
    Manifest manifest;
    std::vector<std::vector<std::uint8_t>> blocks; // one per entry, same order
};

// Checks manifest invariants (tag set for k, lossless coordinates, range
// shapes, parseable PCA block). Throws ContainerError on violation.
void validate_manifest(const Manifest& manifest);

// Assigns entry offsets/lengths in order and writes
//   "GSMC" | u32 version | u32 manifest length | manifest JSON | blocks.
void pack_container(Manifest& manifest, const std::vector<std::vector<std::uint8_t>>& blocks,
                    const std::string& path);

// Rejects bad magic, truncation, trailing bytes, overlapping block ranges,
// and lossy coordinate entries. The result repacks byte-identically.
Container unpack_container(const std::string& path);

struct BitrateReport {
    std::uint64_t header_bytes = 0; // magic + version + length prefix + manifest
    std::uint64_t total_bytes = 0;
    double bpp = 0.0; // 8 * total_bytes / n_real
    std::vector<std::pair<std::string, std::uint64_t>> image_bytes;
};

BitrateReport bitrate_report(const Container& container);

} // namespace gsmc
