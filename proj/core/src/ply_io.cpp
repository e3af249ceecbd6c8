#include "gsmc/ply_io.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "gsmc/error.hpp"

namespace gsmc {

namespace {

std::size_t scalar_size(const std::string& type) {
    if (type == "char" || type == "int8" || type == "uchar" || type == "uint8") return 1;
    if (type == "short" || type == "int16" || type == "ushort" || type == "uint16") return 2;
    if (type == "int" || type == "int32" || type == "uint" || type == "uint32") return 4;
    if (type == "float" || type == "float32") return 4;
    if (type == "double" || type == "float64") return 8;
    return 0;
}

bool is_float32(const std::string& type) { return type == "float" || type == "float32"; }

std::vector<std::string> required_properties() {
    std::vector<std::string> names = {"x", "y", "z"};
    for (int i = 0; i < 3; ++i) names.push_back("f_dc_" + std::to_string(i));
    for (int i = 0; i < 45; ++i) names.push_back("f_rest_" + std::to_string(i));
    names.push_back("opacity");
    for (int i = 0; i < 3; ++i) names.push_back("scale_" + std::to_string(i));
    for (int i = 0; i < 4; ++i) names.push_back("rot_" + std::to_string(i));
    return names;
}

struct Element {
    std::string name;
    std::size_t count = 0;
    std::vector<std::pair<std::string, std::string>> properties; // (type, name)
};

struct Header {
    std::vector<Element> elements;
    std::size_t byte_size = 0;
};

Header parse_header(std::istream& in, const std::string& path) {
    std::string line;
    if (!std::getline(in, line)) throw SchemaError(path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "ply") throw SchemaError(path + ": not a PLY file");

    Header h;
    bool format_seen = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream ls(line);
        std::string keyword;
        ls >> keyword;
        if (keyword == "comment" || keyword == "obj_info" || keyword.empty()) continue;
        if (keyword == "format") {
            std::string fmt;
            ls >> fmt;
            if (fmt != "binary_little_endian") {
                throw SchemaError(path + ": unsupported format '" + fmt +
                                  "' (binary_little_endian required)");
            }
            format_seen = true;
        } else if (keyword == "element") {
            Element e;
            ls >> e.name >> e.count;
            h.elements.push_back(std::move(e));
        } else if (keyword == "property") {
            if (h.elements.empty()) throw SchemaError(path + ": property before element");
            std::string type;
            ls >> type;
            if (type == "list") {
                throw SchemaError(path + ": list property unsupported in element '" +
                                  h.elements.back().name + "'");
            }
            std::string name;
            ls >> name;
            if (scalar_size(type) == 0) {
                throw SchemaError(path + ": unknown property type '" + type + "'");
            }
            h.elements.back().properties.emplace_back(type, name);
        } else if (keyword == "end_header") {
            if (!format_seen) throw SchemaError(path + ": missing format line");
            return h;
        } else {
            throw SchemaError(path + ": unexpected header keyword '" + keyword + "'");
        }
    }
    throw SchemaError(path + ": end_header not found");
}

float load_f32le(const unsigned char* p) {
    std::uint32_t u = std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 |
                      std::uint32_t(p[2]) << 16 | std::uint32_t(p[3]) << 24;
    float f;
    std::memcpy(&f, &u, sizeof(f));
    return f;
}

void store_f32le(float f, unsigned char* p) {
    std::uint32_t u;
    std::memcpy(&u, &f, sizeof(u));
    p[0] = static_cast<unsigned char>(u);
    p[1] = static_cast<unsigned char>(u >> 8);
    p[2] = static_cast<unsigned char>(u >> 16);
    p[3] = static_cast<unsigned char>(u >> 24);
}

} // namespace

GaussianCloud load_cloud(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    const std::string pstr = path.string();
    Header header = parse_header(in, pstr);

    const Element* vertex = nullptr;
    std::size_t skip_before = 0;
    for (const auto& e : header.elements) {
        if (e.name == "vertex") {
            vertex = &e;
            break;
        }
        std::size_t stride = 0;
        for (const auto& [type, name] : e.properties) stride += scalar_size(type);
        skip_before += stride * e.count;
    }
    if (!vertex) throw SchemaError(pstr + ": no vertex element");
    if (vertex->count == 0) throw DataError(pstr + ": vertex element is empty");

    // Byte offset and type check for each required property.
    std::map<std::string, std::size_t> offsets;
    std::size_t stride = 0;
    for (const auto& [type, name] : vertex->properties) {
        if (is_float32(type)) offsets[name] = stride;
        stride += scalar_size(type);
    }
    const auto required = required_properties();
    std::vector<std::size_t> req_off(required.size());
    for (std::size_t i = 0; i < required.size(); ++i) {
        auto it = offsets.find(required[i]);
        if (it == offsets.end()) {
            throw SchemaError(pstr + ": missing float property '" + required[i] + "'");
        }
        req_off[i] = it->second;
    }

    if (skip_before) in.seekg(static_cast<std::streamoff>(skip_before), std::ios::cur);

    const std::size_t n = vertex->count;
    std::vector<unsigned char> buf(stride * n);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (static_cast<std::size_t>(in.gcount()) != buf.size()) {
        throw SchemaError(pstr + ": vertex payload truncated");
    }

    GaussianCloud cloud = GaussianCloud::zeros(n);
    struct Dest {
        float* data;
        std::size_t channels;
    };
    const Dest dests[] = {
        {cloud.positions.data(), kPositionChannels}, {cloud.sh_dc.data(), kShDcChannels},
        {cloud.sh_ac.data(), kShAcChannels},         {cloud.opacity.data(), kOpacityChannels},
        {cloud.scale.data(), kScaleChannels},        {cloud.rotation.data(), kRotationChannels}};

    for (std::size_t i = 0; i < n; ++i) {
        const unsigned char* row = buf.data() + i * stride;
        std::size_t prop = 0;
        for (const Dest& d : dests) {
            for (std::size_t c = 0; c < d.channels; ++c, ++prop) {
                d.data[i * d.channels + c] = load_f32le(row + req_off[prop]);
            }
        }
    }
    for (const Dest& d : dests) {
        for (std::size_t i = 0; i < n * d.channels; ++i) {
            if (!std::isfinite(d.data[i])) {
                throw DataError(pstr + ": non-finite value at primitive " +
                                std::to_string(i / d.channels));
            }
        }
    }
    return cloud;
}

void save_cloud(const GaussianCloud& cloud, const std::filesystem::path& path) {
    cloud.validate();

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");

    out << "ply\nformat binary_little_endian 1.0\n";
    out << "element vertex " << cloud.count << "\n";
    for (const auto& name : required_properties()) out << "property float " << name << "\n";
    out << "end_header\n";

    const std::size_t n = cloud.count;
    std::vector<unsigned char> buf(n * kTotalChannels * 4);
    for (std::size_t i = 0; i < n; ++i) {
        unsigned char* row = buf.data() + i * kTotalChannels * 4;
        std::size_t k = 0;
        auto put = [&](const std::vector<float>& v, std::size_t c) {
            for (std::size_t j = 0; j < c; ++j) store_f32le(v[i * c + j], row + 4 * k++);
        };
        put(cloud.positions, kPositionChannels);
        put(cloud.sh_dc, kShDcChannels);
        put(cloud.sh_ac, kShAcChannels);
        put(cloud.opacity, kOpacityChannels);
        put(cloud.scale, kScaleChannels);
        put(cloud.rotation, kRotationChannels);
    }
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!out) throw IoError("write failed: " + path.string());
}

} // namespace gsmc
