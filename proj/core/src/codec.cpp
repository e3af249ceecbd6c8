#include "gsmc/codec.hpp"

#include <cerrno>
#include <cstdlib>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

#include <sys/wait.h>
#include <zlib.h>

#include <nlohmann/json.hpp>

#include "gsmc/error.hpp"

namespace gsmc {

namespace fs = std::filesystem;

std::vector<std::uint8_t> write_yuv444p10(const AttributeImage& image) {
    const std::size_t pixels = image.pixel_count();
    std::vector<std::uint8_t> bytes;
    bytes.reserve(pixels * 6);
    for (const auto& plane : image.planes) {
        if (plane.size() != pixels) throw ShapeError("plane size mismatch in " + image.tag);
        for (std::uint16_t v : plane) {
            if (v >= 1024) {
                throw DataError("sample " + std::to_string(v) + " exceeds 10 bits in " + image.tag);
            }
            bytes.push_back(static_cast<std::uint8_t>(v & 0xff));
            bytes.push_back(static_cast<std::uint8_t>(v >> 8));
        }
    }
    return bytes;
}

AttributeImage read_yuv444p10(const std::vector<std::uint8_t>& bytes, std::uint32_t side,
                              const std::string& tag) {
    const std::size_t pixels = std::size_t(side) * side;
    if (bytes.size() != pixels * 6) {
        throw DataError("raw frame for " + tag + " is " + std::to_string(bytes.size()) +
                        " bytes, expected " + std::to_string(pixels * 6));
    }
    AttributeImage image;
    image.tag = tag;
    image.side = side;
    const std::uint8_t* p = bytes.data();
    for (auto& plane : image.planes) {
        plane.resize(pixels);
        for (std::size_t i = 0; i < pixels; ++i, p += 2) {
            const std::uint16_t v = static_cast<std::uint16_t>(p[0] | (p[1] << 8));
            if (v >= 1024) {
                throw IntegrityError("decoded sample " + std::to_string(v) + " exceeds 10 bits in " +
                                     tag);
            }
            plane[i] = v;
        }
    }
    return image;
}

namespace {

// Internal block format: per plane, left-neighbor delta over the flat
// raster (first sample unpredicted), residuals as 16-bit two's-complement
// little-endian words; the three residual planes concatenated and passed
// through one zlib stream.
std::vector<std::uint8_t> deflate_bytes(const std::vector<std::uint8_t>& raw) {
    uLongf bound = compressBound(static_cast<uLong>(raw.size()));
    std::vector<std::uint8_t> out(bound);
    const int rc = compress2(out.data(), &bound, raw.data(), static_cast<uLong>(raw.size()),
                             Z_DEFAULT_COMPRESSION);
    if (rc != Z_OK) throw IntegrityError("deflate failed with code " + std::to_string(rc));
    out.resize(bound);
    return out;
}

std::vector<std::uint8_t> inflate_bytes(const std::vector<std::uint8_t>& compressed,
                                        std::size_t expected) {
    std::vector<std::uint8_t> out(expected);
    uLongf len = static_cast<uLongf>(expected);
    const int rc = uncompress(out.data(), &len, compressed.data(),
                              static_cast<uLong>(compressed.size()));
    if (rc != Z_OK || len != expected) throw IntegrityError("inflate failed: corrupt block");
    return out;
}

std::vector<std::uint8_t> internal_encode(const AttributeImage& image, bool lossless, int qp) {
    if (qp < 0 || qp > 9) throw ConfigError("qp must be in [0, 9], got " + std::to_string(qp));
    const int shift = lossless ? 0 : qp;
    const std::size_t pixels = image.pixel_count();
    std::vector<std::uint8_t> residuals;
    residuals.reserve(pixels * 6);
    for (const auto& plane : image.planes) {
        std::uint16_t prev = 0;
        for (std::size_t i = 0; i < pixels; ++i) {
            if (plane[i] >= 1024) {
                throw DataError("sample exceeds 10 bits in " + image.tag);
            }
            const std::uint16_t v = static_cast<std::uint16_t>(plane[i] >> shift);
            const std::uint16_t r = i == 0 ? v : static_cast<std::uint16_t>(v - prev);
            residuals.push_back(static_cast<std::uint8_t>(r & 0xff));
            residuals.push_back(static_cast<std::uint8_t>(r >> 8));
            prev = v;
        }
    }
    return deflate_bytes(residuals);
}

AttributeImage internal_decode(const std::vector<std::uint8_t>& bytes, const std::string& tag,
                               std::uint32_t side, bool lossless, int qp) {
    const int shift = lossless ? 0 : qp;
    const std::size_t pixels = std::size_t(side) * side;
    const std::vector<std::uint8_t> residuals = inflate_bytes(bytes, pixels * 6);
    AttributeImage image;
    image.tag = tag;
    image.side = side;
    const std::uint8_t* p = residuals.data();
    for (auto& plane : image.planes) {
        plane.resize(pixels);
        std::uint16_t prev = 0;
        for (std::size_t i = 0; i < pixels; ++i, p += 2) {
            const std::uint16_t r = static_cast<std::uint16_t>(p[0] | (p[1] << 8));
            const std::uint16_t v = i == 0 ? r : static_cast<std::uint16_t>(prev + r);
            prev = v;
            const std::uint16_t restored =
                shift == 0 ? v
                           : static_cast<std::uint16_t>((v << shift) + (1u << (shift - 1)));
            if (restored >= 1024) {
                throw IntegrityError("decoded sample exceeds 10 bits in " + tag);
            }
            plane[i] = restored;
        }
    }
    return image;
}

std::vector<std::uint8_t> read_file_bytes(const fs::path& path, const std::string& what) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + what + ": " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return bytes;
}

void write_file_bytes(const fs::path& path, const std::vector<std::uint8_t>& bytes,
                      const std::string& what) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + what + ": " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("short write: " + path.string());
}

std::string substitute(std::string tmpl, const std::string& key, const std::string& value) {
    std::size_t at = 0;
    while ((at = tmpl.find(key, at)) != std::string::npos) {
        tmpl.replace(at, key.size(), value);
        at += value.size();
    }
    return tmpl;
}

std::string run_command(const std::string& command) {
    const std::string with_stderr = command + " 2>&1";
    FILE* pipe = popen(with_stderr.c_str(), "r");
    if (pipe == nullptr) {
        throw BackendError("cannot launch backend command: " + std::string(std::strerror(errno)));
    }
    std::string output;
    char buf[4096];
    std::size_t got;
    while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) output.append(buf, got);
    const int status = pclose(pipe);
    if (status != 0) {
        const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        if (output.size() > 2000) output = output.substr(output.size() - 2000);
        throw BackendError("backend command failed (exit " + std::to_string(code) + "): " +
                           command + "\n" + output);
    }
    return output;
}

class ScratchDir {
public:
    ScratchDir() {
        std::string tmpl = (fs::temp_directory_path() / "gsmc-XXXXXX").string();
        if (mkdtemp(tmpl.data()) == nullptr) {
            throw IoError("cannot create scratch directory: " + std::string(std::strerror(errno)));
        }
        path_ = tmpl;
    }
    ~ScratchDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

void require_placeholders(const std::string& tmpl, const std::vector<std::string>& keys,
                          const std::string& which) {
    for (const std::string& key : keys) {
        if (tmpl.find(key) == std::string::npos) {
            throw ConfigError(which + " template is missing placeholder " + key);
        }
    }
}

} // namespace

ExternalCodecConfig load_backend_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read backend config: " + path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("backend config is not valid JSON: " + std::string(e.what()));
    }
    ExternalCodecConfig cfg;
    try {
        cfg.id = doc.at("id").get<std::string>();
        cfg.encode_template = doc.at("encode").get<std::string>();
        cfg.decode_template = doc.at("decode").get<std::string>();
        cfg.lossless_flag = doc.value("lossless_flag", std::string{});
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("backend config missing field: " + std::string(e.what()));
    }
    return cfg;
}

CodecBackend CodecBackend::internal() { return CodecBackend{}; }

CodecBackend CodecBackend::external(ExternalCodecConfig cfg) {
    if (cfg.id.empty() || cfg.id == "internal") {
        throw ConfigError("external backend needs a distinct non-empty id");
    }
    require_placeholders(cfg.encode_template, {"{in}", "{out}", "{w}", "{h}", "{qp}", "{lossless}"},
                         "encode");
    require_placeholders(cfg.decode_template, {"{in}", "{out}", "{w}", "{h}"}, "decode");
    CodecBackend backend;
    backend.internal_ = false;
    backend.id_ = cfg.id;
    backend.config_ = std::move(cfg);
    return backend;
}

CodecBackend resolve_backend(const std::string& config_path) {
    if (!config_path.empty()) return CodecBackend::external(load_backend_config(config_path));
    if (const char* env = std::getenv("GSMC_BACKEND"); env != nullptr && *env != '\0') {
        return CodecBackend::external(load_backend_config(env));
    }
    return CodecBackend::internal();
}

std::vector<std::uint8_t> CodecBackend::encode_image(const AttributeImage& image, bool lossless,
                                                     int qp) const {
    std::vector<std::uint8_t> block;
    if (internal_) {
        block = internal_encode(image, lossless, qp);
    } else {
        const ScratchDir scratch;
        const fs::path in = scratch.path() / (image.tag + ".yuv");
        const fs::path out = scratch.path() / (image.tag + ".bin");
        write_file_bytes(in, write_yuv444p10(image), "raw frame");
        std::string cmd = config_.encode_template;
        cmd = substitute(cmd, "{in}", in.string());
        cmd = substitute(cmd, "{out}", out.string());
        cmd = substitute(cmd, "{w}", std::to_string(image.side));
        cmd = substitute(cmd, "{h}", std::to_string(image.side));
        cmd = substitute(cmd, "{qp}", std::to_string(qp));
        cmd = substitute(cmd, "{lossless}", lossless ? config_.lossless_flag : std::string{});
        run_command(cmd);
        if (!fs::exists(out)) throw BackendError("backend produced no output for " + image.tag);
        block = read_file_bytes(out, "encoded block");
    }
    if (lossless) {
        const AttributeImage check = decode_image(block, image.tag, image.side, true, 0);
        if (check.planes != image.planes) {
            throw IntegrityError("lossless verification failed for image " + image.tag);
        }
    }
    return block;
}

AttributeImage CodecBackend::decode_image(const std::vector<std::uint8_t>& bytes,
                                          const std::string& tag, std::uint32_t side, bool lossless,
                                          int qp) const {
    if (internal_) return internal_decode(bytes, tag, side, lossless, qp);
    const ScratchDir scratch;
    const fs::path in = scratch.path() / (tag + ".bin");
    const fs::path out = scratch.path() / (tag + ".yuv");
    write_file_bytes(in, bytes, "encoded block");
    std::string cmd = config_.decode_template;
    cmd = substitute(cmd, "{in}", in.string());
    cmd = substitute(cmd, "{out}", out.string());
    cmd = substitute(cmd, "{w}", std::to_string(side));
    cmd = substitute(cmd, "{h}", std::to_string(side));
    run_command(cmd);
    if (!fs::exists(out)) throw BackendError("backend produced no output for " + tag);
    const std::vector<std::uint8_t> raw = read_file_bytes(out, "raw frame");
    const std::size_t expected = std::size_t(side) * side * 6;
    if (raw.size() != expected) {
        throw BackendError("backend returned " + std::to_string(raw.size()) + " bytes for " + tag +
                           ", expected " + std::to_string(expected));
    }
    return read_yuv444p10(raw, side, tag);
}

} // namespace gsmc
