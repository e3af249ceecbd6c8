#include "gsmc/container.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

#include "gsmc/error.hpp"
#include "gsmc/maps.hpp"
#include "gsmc/pca.hpp"

namespace gsmc {

namespace {

using nlohmann::json;

constexpr char kMagic[4] = {'G', 'S', 'M', 'C'};

std::string to_hex(const std::vector<std::uint8_t>& bytes) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (std::uint8_t b : bytes) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 15]);
    }
    return out;
}

std::vector<std::uint8_t> from_hex(const std::string& text) {
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        return -1;
    };
    if (text.size() % 2 != 0) throw ContainerError("odd-length hex field in manifest");
    std::vector<std::uint8_t> bytes(text.size() / 2);
    for (std::size_t i = 0; i < bytes.size(); ++i) {
        const int hi = nibble(text[2 * i]);
        const int lo = nibble(text[2 * i + 1]);
        if (hi < 0 || lo < 0) throw ContainerError("invalid hex digit in manifest");
        bytes[i] = static_cast<std::uint8_t>(hi << 4 | lo);
    }
    return bytes;
}

json group_to_json(const ChannelGroupParams& g) {
    json j;
    j["bits"] = g.bits;
    j["min"] = json::array();
    j["max"] = json::array();
    for (float v : g.min) j["min"].push_back(static_cast<double>(v));
    for (float v : g.max) j["max"].push_back(static_cast<double>(v));
    return j;
}

ChannelGroupParams group_from_json(const json& j, std::size_t channels, int bits) {
    ChannelGroupParams g;
    g.bits = j.at("bits").get<int>();
    if (g.bits != bits) throw ContainerError("unexpected bit depth in manifest ranges");
    for (const auto& v : j.at("min")) g.min.push_back(static_cast<float>(v.get<double>()));
    for (const auto& v : j.at("max")) g.max.push_back(static_cast<float>(v.get<double>()));
    if (g.min.size() != channels || g.max.size() != channels) {
        throw ContainerError("wrong channel count in manifest ranges");
    }
    for (std::size_t c = 0; c < channels; ++c) {
        if (!std::isfinite(g.min[c]) || !std::isfinite(g.max[c]) || g.min[c] > g.max[c]) {
            throw ContainerError("invalid range in manifest");
        }
    }
    return g;
}

void put_u32le(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t get_u32le(const std::string& bytes, std::size_t at) {
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<std::uint8_t>(bytes[at + i]);
    return v;
}

} // namespace

std::string manifest_to_json(const Manifest& m) {
    json doc;
    doc["version"] = m.version;
    doc["n_real"] = m.n_real;
    doc["side"] = m.side;
    doc["k"] = m.k;
    doc["backend"] = m.backend_id;
    doc["pca"] = to_hex(m.pca_blob);
    doc["ranges"] = {
        {"positions", group_to_json(m.params.positions)},
        {"sh_dc", group_to_json(m.params.sh_dc)},
        {"ac", group_to_json(m.params.ac)},
        {"opacity", group_to_json(m.params.opacity)},
        {"scale", group_to_json(m.params.scale)},
        {"rotation", group_to_json(m.params.rotation)},
    };
    doc["schedule"] = {
        {"mbs", m.schedule.mbs}, {"iterations", m.schedule.iterations}, {"seed", m.schedule.seed}};
    doc["entries"] = json::array();
    for (const ImageEntry& e : m.entries) {
        doc["entries"].push_back({{"tag", e.tag},
                                  {"lossless", e.lossless},
                                  {"qp", e.qp},
                                  {"offset", e.offset},
                                  {"length", e.length}});
    }
    return doc.dump();
}

Manifest manifest_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ContainerError("manifest is not valid JSON: " + std::string(e.what()));
    }
    Manifest m;
    try {
        m.version = doc.at("version").get<std::uint32_t>();
        m.n_real = doc.at("n_real").get<std::uint64_t>();
        m.side = doc.at("side").get<std::uint32_t>();
        m.k = doc.at("k").get<std::uint32_t>();
        m.backend_id = doc.at("backend").get<std::string>();
        m.pca_blob = from_hex(doc.at("pca").get<std::string>());
        const json& r = doc.at("ranges");
        m.params.positions = group_from_json(r.at("positions"), 3, kCoordBits);
        m.params.sh_dc = group_from_json(r.at("sh_dc"), 3, kAttributeBits);
        m.params.ac = group_from_json(r.at("ac"), m.k, kAttributeBits);
        m.params.opacity = group_from_json(r.at("opacity"), 1, kAttributeBits);
        m.params.scale = group_from_json(r.at("scale"), 3, kAttributeBits);
        m.params.rotation = group_from_json(r.at("rotation"), 4, kAttributeBits);
        const json& s = doc.at("schedule");
        m.schedule.mbs = s.at("mbs").get<std::uint32_t>();
        m.schedule.iterations = s.at("iterations").get<std::uint32_t>();
        m.schedule.seed = s.at("seed").get<std::uint64_t>();
        for (const json& e : doc.at("entries")) {
            ImageEntry entry;
            entry.tag = e.at("tag").get<std::string>();
            entry.lossless = e.at("lossless").get<bool>();
            entry.qp = e.at("qp").get<int>();
            entry.offset = e.at("offset").get<std::uint64_t>();
            entry.length = e.at("length").get<std::uint64_t>();
            m.entries.push_back(std::move(entry));
        }
    } catch (const json::exception& e) {
        throw ContainerError("manifest field error: " + std::string(e.what()));
    }
    return m;
}

void validate_manifest(const Manifest& m) {
    if (m.version != kContainerVersion) {
        throw ContainerError("unsupported container version " + std::to_string(m.version));
    }
    if (m.n_real == 0) throw ContainerError("manifest declares zero primitives");
    if (m.n_real > 0xffffffffULL) throw ContainerError("primitive count exceeds 32-bit layout");
    if (m.side == 0 || (m.side & (m.side - 1)) != 0) {
        throw ContainerError("grid side must be a power of two");
    }
    if (std::uint64_t(m.side) * m.side < m.n_real) {
        throw ContainerError("grid smaller than primitive count");
    }
    if (m.k < 3 || m.k > 45 || m.k % 3 != 0) {
        throw ContainerError("k must be a multiple of 3 in [3, 45]");
    }
    if (m.backend_id.empty()) throw ContainerError("empty backend id");

    const std::vector<std::string> tags = image_tags(m.k);
    if (m.entries.size() != tags.size()) {
        throw ContainerError("expected " + std::to_string(tags.size()) + " images, manifest has " +
                             std::to_string(m.entries.size()));
    }
    for (std::size_t i = 0; i < tags.size(); ++i) {
        const ImageEntry& e = m.entries[i];
        if (e.tag != tags[i]) {
            throw ContainerError("image " + std::to_string(i) + " is " + e.tag + ", expected " +
                                 tags[i]);
        }
        if (e.qp < 0 || (e.lossless && e.qp != 0)) {
            throw ContainerError("invalid qp " + std::to_string(e.qp) + " for " + e.tag);
        }
        if ((e.tag == "coord_hi" || e.tag == "coord_lo") && !e.lossless) {
            throw ContainerError("coordinate image " + e.tag + " must be lossless");
        }
    }

    const auto check_channels = [](const ChannelGroupParams& g, std::size_t n, int bits,
                                   const char* name) {
        if (g.bits != bits || g.min.size() != n || g.max.size() != n) {
            throw ContainerError(std::string("malformed range group: ") + name);
        }
    };
    check_channels(m.params.positions, 3, kCoordBits, "positions");
    check_channels(m.params.sh_dc, 3, kAttributeBits, "sh_dc");
    check_channels(m.params.ac, m.k, kAttributeBits, "ac");
    check_channels(m.params.opacity, 1, kAttributeBits, "opacity");
    check_channels(m.params.scale, 3, kAttributeBits, "scale");
    check_channels(m.params.rotation, 4, kAttributeBits, "rotation");

    PcaModel model;
    try {
        model = parse_model(m.pca_blob);
    } catch (const Error& e) {
        throw ContainerError(std::string("bad PCA metadata: ") + e.what());
    }
    if (model.k != m.k) throw ContainerError("PCA metadata k does not match manifest k");
}

void pack_container(Manifest& manifest, const std::vector<std::vector<std::uint8_t>>& blocks,
                    const std::string& path) {
    if (blocks.size() != manifest.entries.size()) {
        throw ContainerError("block count does not match manifest entries");
    }
    std::uint64_t offset = 0;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        manifest.entries[i].offset = offset;
        manifest.entries[i].length = blocks[i].size();
        offset += blocks[i].size();
    }
    validate_manifest(manifest);

    const std::string text = manifest_to_json(manifest);
    std::string header;
    header.append(kMagic, 4);
    put_u32le(header, manifest.version);
    put_u32le(header, static_cast<std::uint32_t>(text.size()));

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write container: " + path);
    out.write(header.data(), static_cast<std::streamsize>(header.size()));
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    for (const auto& block : blocks) {
        out.write(reinterpret_cast<const char*>(block.data()),
                  static_cast<std::streamsize>(block.size()));
    }
    out.flush();
    if (!out) throw IoError("short write: " + path);
}

Container unpack_container(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read container: " + path);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    if (bytes.size() < 12) throw ContainerError("truncated container: no header");
    if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw ContainerError("bad magic bytes");
    const std::uint32_t version = get_u32le(bytes, 4);
    const std::uint32_t manifest_len = get_u32le(bytes, 8);
    if (bytes.size() < 12 + std::uint64_t(manifest_len)) {
        throw ContainerError("truncated container: manifest cut short");
    }

    Container c;
    c.manifest = manifest_from_json(bytes.substr(12, manifest_len));
    if (c.manifest.version != version) {
        throw ContainerError("header/manifest version mismatch");
    }
    validate_manifest(c.manifest);

    const std::uint64_t region_start = 12 + std::uint64_t(manifest_len);
    const std::uint64_t region_size = bytes.size() - region_start;

    std::uint64_t end = 0;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> spans;
    for (const ImageEntry& e : c.manifest.entries) {
        if (e.offset + e.length < e.offset || e.offset + e.length > region_size) {
            throw ContainerError("truncated container: block " + e.tag + " out of bounds");
        }
        spans.emplace_back(e.offset, e.offset + e.length);
        end = std::max(end, e.offset + e.length);
    }
    std::sort(spans.begin(), spans.end());
    for (std::size_t i = 1; i < spans.size(); ++i) {
        if (spans[i].first < spans[i - 1].second) throw ContainerError("overlapping block ranges");
    }
    if (end != region_size) throw ContainerError("container has trailing bytes");

    for (const ImageEntry& e : c.manifest.entries) {
        const char* at = bytes.data() + region_start + e.offset;
        c.blocks.emplace_back(reinterpret_cast<const std::uint8_t*>(at),
                              reinterpret_cast<const std::uint8_t*>(at) + e.length);
    }
    return c;
}

BitrateReport bitrate_report(const Container& container) {
    BitrateReport report;
    report.header_bytes = 12 + manifest_to_json(container.manifest).size();
    report.total_bytes = report.header_bytes;
    for (std::size_t i = 0; i < container.manifest.entries.size(); ++i) {
        const ImageEntry& e = container.manifest.entries[i];
        report.image_bytes.emplace_back(e.tag, e.length);
        report.total_bytes += e.length;
    }
    report.bpp = 8.0 * static_cast<double>(report.total_bytes) /
                 static_cast<double>(container.manifest.n_real);
    return report;
}

} // namespace gsmc
