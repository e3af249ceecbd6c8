#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gsmc/maps.hpp"

namespace gsmc {

// Raw planar frame: plane order ch0,ch1,ch2, row-major, one 16-bit
// little-endian word per sample with the value in the low 10 bits.
std::vector<std::uint8_t> write_yuv444p10(const AttributeImage& image);
AttributeImage read_yuv444p10(const std::vector<std::uint8_t>& bytes, std::uint32_t side,
                              const std::string& tag);

// External codec invoked through shell command templates. The encode
// template must contain all of {in} {out} {w} {h} {qp} {lossless};
// the decode template needs {in} {out} {w} {h}. {lossless} expands to
// `lossless_flag` in lossless mode and to the empty string otherwise.
struct ExternalCodecConfig {
    std::string id;
    std::string encode_template;
    std::string decode_template;
    std::string lossless_flag;
};

ExternalCodecConfig load_backend_config(const std::string& path);

class CodecBackend {
public:
    static CodecBackend internal();
    static CodecBackend external(ExternalCodecConfig cfg);

    const std::string& id() const { return id_; }
    bool is_internal() const { return internal_; }

    // Lossless mode roundtrips bit-exactly (encode re-checks by decoding).
    // Internal lossy(qp) drops the qp low bits of every sample and restores
    // the dropped range midpoint, so per-sample error is at most 2^(qp-1).
    std::vector<std::uint8_t> encode_image(const AttributeImage& image, bool lossless,
                                           int qp) const;
    AttributeImage decode_image(const std::vector<std::uint8_t>& bytes, const std::string& tag,
                                std::uint32_t side, bool lossless, int qp) const;

private:
    CodecBackend() = default;

    bool internal_ = true;
    std::string id_ = "internal";
    ExternalCodecConfig config_;
};

// Backend resolution order: explicit config path, then the GSMC_BACKEND
// environment variable, then the internal codec.
CodecBackend resolve_backend(const std::string& config_path);

} // namespace gsmc
