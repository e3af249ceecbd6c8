#include "gsmc/maps.hpp"

#include <algorithm>

#include "gsmc/error.hpp"

namespace gsmc {

const AttributeImage* AttributeMapSet::find(const std::string& tag) const {
    for (const AttributeImage& img : images) {
        if (img.tag == tag) return &img;
    }
    return nullptr;
}

std::vector<std::string> image_tags(std::size_t k) {
    if (k == 0 || k % 3 != 0 || k > 45) {
        throw ConfigError("k must be a positive multiple of 3 no greater than 45");
    }
    std::vector<std::string> tags = {"coord_hi", "coord_lo", "sh_dc"};
    for (std::size_t t = 0; t < k / 3; ++t) tags.push_back("ac_" + std::to_string(t));
    tags.insert(tags.end(), {"scale", "opacity", "rot_0", "rot_1"});
    return tags;
}

namespace {

AttributeImage make_image(std::string tag, std::uint32_t side) {
    AttributeImage img;
    img.tag = std::move(tag);
    img.side = side;
    for (auto& plane : img.planes) plane.assign(std::size_t(side) * side, kMidValue10);
    return img;
}

std::uint16_t quantize10(float v, const ChannelGroupParams& g, std::size_t ch) {
    return static_cast<std::uint16_t>(quantize_value(v, g.min[ch], g.max[ch], g.bits));
}

std::uint16_t read_sample(const AttributeImage& img, std::size_t plane, std::size_t cell) {
    const std::uint16_t v = img.planes[plane][cell];
    if (v >= 1024) {
        throw IntegrityError("corrupt sample " + std::to_string(v) + " in image " + img.tag);
    }
    return v;
}

} // namespace

AttributeMapSet assemble(const GaussianCloud& sorted_cloud, const AcCoefficients& coeffs,
                         const GridLayout& layout, const QuantizationParams& params) {
    if (layout.n_real != sorted_cloud.count) {
        throw ShapeError("assemble: layout covers " + std::to_string(layout.n_real) +
                         " primitives, cloud has " + std::to_string(sorted_cloud.count));
    }
    if (coeffs.coeffs.size() != sorted_cloud.count * coeffs.k) {
        throw ShapeError("assemble: coefficient matrix is not N x k");
    }
    const std::size_t n_k = coeffs.k / 3;
    if (coeffs.k == 0 || coeffs.k % 3 != 0) throw ConfigError("assemble: k must be a multiple of 3");

    const std::uint32_t m = layout.side;
    const std::size_t cells = std::size_t(m) * m;
    std::uint32_t tail = layout.order[layout.raster_of_rank(layout.n_real - 1)];
    if (tail == kPaddingCell) tail = layout.n_real - 1;
    std::vector<std::uint32_t> src(cells);
    for (std::size_t cell = 0; cell < cells; ++cell) {
        const std::uint32_t idx = layout.order[cell];
        src[cell] = idx == kPaddingCell ? tail : idx;
    }

    AttributeMapSet maps;
    maps.side = m;
    maps.n_real = layout.n_real;

    AttributeImage coord_hi = make_image("coord_hi", m);
    AttributeImage coord_lo = make_image("coord_lo", m);
    for (std::size_t axis = 0; axis < 3; ++axis) {
        const float lo = params.positions.min[axis];
        const float hi = params.positions.max[axis];
        for (std::size_t cell = 0; cell < cells; ++cell) {
            const float v = sorted_cloud.positions[std::size_t(src[cell]) * 3 + axis];
            const auto [h, l] = split_hi_lo(quantize_value(v, lo, hi, params.positions.bits));
            coord_hi.planes[axis][cell] = h;
            coord_lo.planes[axis][cell] = l;
        }
    }
    maps.images.push_back(std::move(coord_hi));
    maps.images.push_back(std::move(coord_lo));

    AttributeImage sh_dc = make_image("sh_dc", m);
    for (std::size_t ch = 0; ch < 3; ++ch) {
        for (std::size_t cell = 0; cell < cells; ++cell) {
            const float v = sorted_cloud.sh_dc[std::size_t(src[cell]) * 3 + ch];
            sh_dc.planes[ch][cell] = quantize10(v, params.sh_dc, ch);
        }
    }
    maps.images.push_back(std::move(sh_dc));

    for (std::size_t t = 0; t < n_k; ++t) {
        AttributeImage ac = make_image("ac_" + std::to_string(t), m);
        for (std::size_t ch = 0; ch < 3; ++ch) {
            const std::size_t coeff = t * 3 + ch;
            for (std::size_t cell = 0; cell < cells; ++cell) {
                const float v = coeffs.coeffs[std::size_t(src[cell]) * coeffs.k + coeff];
                ac.planes[ch][cell] = quantize10(v, params.ac, coeff);
            }
        }
        maps.images.push_back(std::move(ac));
    }

    AttributeImage scale = make_image("scale", m);
    for (std::size_t ch = 0; ch < 3; ++ch) {
        for (std::size_t cell = 0; cell < cells; ++cell) {
            const float v = sorted_cloud.scale[std::size_t(src[cell]) * 3 + ch];
            scale.planes[ch][cell] = quantize10(v, params.scale, ch);
        }
    }
    maps.images.push_back(std::move(scale));

    AttributeImage opacity = make_image("opacity", m);
    for (std::size_t cell = 0; cell < cells; ++cell) {
        opacity.planes[0][cell] = quantize10(sorted_cloud.opacity[src[cell]], params.opacity, 0);
    }
    maps.images.push_back(std::move(opacity));

    AttributeImage rot_0 = make_image("rot_0", m);
    AttributeImage rot_1 = make_image("rot_1", m);
    for (std::size_t cell = 0; cell < cells; ++cell) {
        const std::size_t base = std::size_t(src[cell]) * 4;
        for (std::size_t ch = 0; ch < 3; ++ch) {
            rot_0.planes[ch][cell] = quantize10(sorted_cloud.rotation[base + ch], params.rotation, ch);
        }
        rot_1.planes[0][cell] = quantize10(sorted_cloud.rotation[base + 3], params.rotation, 3);
    }
    maps.images.push_back(std::move(rot_0));
    maps.images.push_back(std::move(rot_1));
    return maps;
}

GaussianCloud disassemble(const AttributeMapSet& maps, const QuantizationParams& params,
                          const PcaModel& pca) {
    if (maps.n_real == 0) throw ShapeError("disassemble: empty map set");
    if (std::uint64_t(maps.side) * maps.side < maps.n_real) {
        throw ShapeError("disassemble: grid smaller than primitive count");
    }
    const std::size_t k = pca.k;
    std::vector<const AttributeImage*> by_tag;
    for (const std::string& tag : image_tags(k)) {
        const AttributeImage* img = maps.find(tag);
        if (img == nullptr) throw ContainerError("missing image: " + tag);
        if (img->side != maps.side) throw ShapeError("image side mismatch for " + tag);
        by_tag.push_back(img);
    }
    const AttributeImage& coord_hi = *by_tag[0];
    const AttributeImage& coord_lo = *by_tag[1];
    const AttributeImage& sh_dc = *by_tag[2];
    const AttributeImage& scale = *by_tag[3 + k / 3];
    const AttributeImage& opacity = *by_tag[4 + k / 3];
    const AttributeImage& rot_0 = *by_tag[5 + k / 3];
    const AttributeImage& rot_1 = *by_tag[6 + k / 3];

    const std::size_t n = maps.n_real;
    GaussianCloud cloud = GaussianCloud::zeros(n);
    AcCoefficients coeffs;
    coeffs.k = k;
    coeffs.coeffs.resize(n * k);

    for (std::size_t rank = 0; rank < n; ++rank) {
        const auto [col, row] = morton2_decode(rank);
        const std::size_t cell = std::size_t(row) * maps.side + col;
        for (std::size_t axis = 0; axis < 3; ++axis) {
            const std::uint32_t q = join_hi_lo(read_sample(coord_hi, axis, cell),
                                               read_sample(coord_lo, axis, cell));
            cloud.positions[rank * 3 + axis] = dequantize_value(
                q, params.positions.min[axis], params.positions.max[axis], params.positions.bits);
        }
        for (std::size_t ch = 0; ch < 3; ++ch) {
            cloud.sh_dc[rank * 3 + ch] = dequantize_value(
                read_sample(sh_dc, ch, cell), params.sh_dc.min[ch], params.sh_dc.max[ch],
                params.sh_dc.bits);
            cloud.scale[rank * 3 + ch] = dequantize_value(
                read_sample(scale, ch, cell), params.scale.min[ch], params.scale.max[ch],
                params.scale.bits);
            cloud.rotation[rank * 4 + ch] = dequantize_value(
                read_sample(rot_0, ch, cell), params.rotation.min[ch], params.rotation.max[ch],
                params.rotation.bits);
        }
        cloud.opacity[rank] = dequantize_value(read_sample(opacity, 0, cell), params.opacity.min[0],
                                               params.opacity.max[0], params.opacity.bits);
        cloud.rotation[rank * 4 + 3] =
            dequantize_value(read_sample(rot_1, 0, cell), params.rotation.min[3],
                             params.rotation.max[3], params.rotation.bits);
        for (std::size_t t = 0; t < k / 3; ++t) {
            const AttributeImage& ac = *by_tag[3 + t];
            for (std::size_t ch = 0; ch < 3; ++ch) {
                const std::size_t coeff = t * 3 + ch;
                coeffs.coeffs[rank * k + coeff] =
                    dequantize_value(read_sample(ac, ch, cell), params.ac.min[coeff],
                                     params.ac.max[coeff], params.ac.bits);
            }
        }
    }
    cloud.sh_ac = reconstruct(pca, coeffs);
    return cloud;
}

} // namespace gsmc
