#include <algorithm>
#include <vector>

#include <gtest/gtest.h>

#include "gsmc/maps.hpp"
#include "gsmc/synthetic.hpp"
#include "test_util.hpp"

using namespace gsmc;

namespace {

struct Assembled {
    GaussianCloud sorted;
    AcCoefficients coeffs;
    QuantizationParams params;
    GridLayout layout;
    PcaModel parsed; // decoder-side model, k columns
    AttributeMapSet maps;
};

Assembled make_assembled(std::size_t count, std::uint64_t seed, std::uint32_t k,
                         PcaMode mode = PcaMode::joint) {
    SyntheticConfig cfg;
    cfg.count = count;
    cfg.seed = seed;
    GaussianCloud cloud = generate_cloud(cfg);

    Assembled a;
    PcaModel model = fit_pca(cloud.sh_ac, cloud.count, mode);
    a.coeffs = project(model, cloud.sh_ac, cloud.count, k);
    a.params = compute_ranges(cloud, a.coeffs.coeffs, k);
    std::vector<std::uint32_t> perm = sort_by_morton(cloud, a.params);
    a.sorted = apply_permutation(cloud, perm);
    std::vector<float> permuted(a.coeffs.coeffs.size());
    for (std::size_t i = 0; i < perm.size(); ++i) {
        std::copy_n(a.coeffs.coeffs.begin() + std::size_t(perm[i]) * k, k,
                    permuted.begin() + i * k);
    }
    a.coeffs.coeffs = std::move(permuted);
    a.layout = build_layout(a.sorted.count);
    a.parsed = parse_model(serialize_model(model, k));
    a.maps = assemble(a.sorted, a.coeffs, a.layout, a.params);
    return a;
}

} // namespace

TEST(ImageTags, CountAndOrder) {
    EXPECT_EQ(image_tags(3), (std::vector<std::string>{"coord_hi", "coord_lo", "sh_dc", "ac_0",
                                                       "scale", "opacity", "rot_0", "rot_1"}));
    EXPECT_EQ(image_tags(12).size(), 7u + 4u);
    EXPECT_EQ(image_tags(45).size(), 7u + 15u);
    EXPECT_EQ(image_tags(12)[4], "ac_1");
    EXPECT_THROW(image_tags(0), ConfigError);
    EXPECT_THROW(image_tags(4), ConfigError);
    EXPECT_THROW(image_tags(48), ConfigError);
}

TEST(Assemble, ShapeAndTags) {
    Assembled a = make_assembled(150, 1, 12);
    EXPECT_EQ(a.maps.side, 16u);
    EXPECT_EQ(a.maps.n_real, 150u);
    ASSERT_EQ(a.maps.images.size(), 11u);
    const std::vector<std::string> tags = image_tags(12);
    for (std::size_t i = 0; i < tags.size(); ++i) {
        EXPECT_EQ(a.maps.images[i].tag, tags[i]);
        EXPECT_EQ(a.maps.images[i].side, 16u);
        for (const auto& plane : a.maps.images[i].planes) {
            ASSERT_EQ(plane.size(), 256u);
            for (std::uint16_t v : plane) ASSERT_LT(v, 1024);
        }
    }
    EXPECT_NE(a.maps.find("coord_hi"), nullptr);
    EXPECT_EQ(a.maps.find("nope"), nullptr);
}

TEST(Assemble, CoordinatePlanesCarryQuantizedPositions) {
    Assembled a = make_assembled(90, 7, 3);
    const AttributeImage* hi = a.maps.find("coord_hi");
    const AttributeImage* lo = a.maps.find("coord_lo");
    ASSERT_NE(hi, nullptr);
    ASSERT_NE(lo, nullptr);
    for (std::size_t rank = 0; rank < 90; ++rank) {
        const std::size_t cell = a.layout.raster_of_rank(rank);
        const std::uint32_t idx = a.layout.order[cell];
        for (std::size_t axis = 0; axis < 3; ++axis) {
            const std::uint32_t q =
                quantize_value(a.sorted.positions[std::size_t(idx) * 3 + axis],
                               a.params.positions.min[axis], a.params.positions.max[axis], 20);
            ASSERT_EQ(join_hi_lo(hi->planes[axis][cell], lo->planes[axis][cell]), q);
        }
    }
}

TEST(Assemble, PaddingChannelsAreMidValue) {
    for (std::uint32_t k : {3u, 12u, 45u}) {
        Assembled a = make_assembled(40, 11, k);
        const AttributeImage* opacity = a.maps.find("opacity");
        const AttributeImage* rot_1 = a.maps.find("rot_1");
        ASSERT_NE(opacity, nullptr);
        ASSERT_NE(rot_1, nullptr);
        for (std::size_t ch : {1u, 2u}) {
            for (std::uint16_t v : opacity->planes[ch]) ASSERT_EQ(v, 512);
            for (std::uint16_t v : rot_1->planes[ch]) ASSERT_EQ(v, 512);
        }
        // The payload planes are not all mid-value.
        EXPECT_TRUE(std::any_of(opacity->planes[0].begin(), opacity->planes[0].end(),
                                [](std::uint16_t v) { return v != 512; }));
    }
}

TEST(Assemble, PaddingCellsReplicateScanTail) {
    Assembled a = make_assembled(90, 3, 3);
    ASSERT_EQ(a.maps.side, 16u);
    const std::size_t tail_cell = a.layout.raster_of_rank(89);
    for (const AttributeImage& img : a.maps.images) {
        for (std::uint64_t rank = 90; rank < 256; ++rank) {
            const std::size_t cell = a.layout.raster_of_rank(rank);
            for (int p = 0; p < 3; ++p) {
                ASSERT_EQ(img.planes[p][cell], img.planes[p][tail_cell])
                    << img.tag << " rank " << rank;
            }
        }
    }
}

TEST(Assemble, RejectsMismatchedInputs) {
    Assembled a = make_assembled(50, 5, 6);
    GridLayout other = build_layout(49);
    EXPECT_THROW(assemble(a.sorted, a.coeffs, other, a.params), ShapeError);
    AcCoefficients bad = a.coeffs;
    bad.coeffs.pop_back();
    EXPECT_THROW(assemble(a.sorted, bad, a.layout, a.params), ShapeError);
}

TEST(Disassemble, ReproducesQuantizedValuesExactly) {
    for (PcaMode mode : {PcaMode::joint, PcaMode::per_color, PcaMode::order_clip}) {
        Assembled a = make_assembled(333, 17, 12, mode);
        GaussianCloud out = disassemble(a.maps, a.params, a.parsed);
        ASSERT_EQ(out.count, 333u);

        AcCoefficients expect_coeffs;
        expect_coeffs.k = 12;
        expect_coeffs.coeffs.resize(333 * 12);
        for (std::size_t rank = 0; rank < 333; ++rank) {
            const std::uint32_t idx = a.layout.order[a.layout.raster_of_rank(rank)];
            for (std::size_t axis = 0; axis < 3; ++axis) {
                const float v = a.sorted.positions[std::size_t(idx) * 3 + axis];
                const float lo = a.params.positions.min[axis];
                const float hi = a.params.positions.max[axis];
                ASSERT_EQ(out.positions[rank * 3 + axis],
                          dequantize_value(quantize_value(v, lo, hi, 20), lo, hi, 20));
            }
            for (std::size_t ch = 0; ch < 3; ++ch) {
                const float v = a.sorted.sh_dc[std::size_t(idx) * 3 + ch];
                const float lo = a.params.sh_dc.min[ch];
                const float hi = a.params.sh_dc.max[ch];
                ASSERT_EQ(out.sh_dc[rank * 3 + ch],
                          dequantize_value(quantize_value(v, lo, hi, 10), lo, hi, 10));
            }
            for (std::size_t ch = 0; ch < 4; ++ch) {
                const float v = a.sorted.rotation[std::size_t(idx) * 4 + ch];
                const float lo = a.params.rotation.min[ch];
                const float hi = a.params.rotation.max[ch];
                ASSERT_EQ(out.rotation[rank * 4 + ch],
                          dequantize_value(quantize_value(v, lo, hi, 10), lo, hi, 10));
            }
            const float ov = a.sorted.opacity[idx];
            ASSERT_EQ(out.opacity[rank],
                      dequantize_value(quantize_value(ov, a.params.opacity.min[0],
                                                      a.params.opacity.max[0], 10),
                                       a.params.opacity.min[0], a.params.opacity.max[0], 10));
            for (std::size_t j = 0; j < 12; ++j) {
                const float v = a.coeffs.coeffs[std::size_t(idx) * 12 + j];
                const float lo = a.params.ac.min[j];
                const float hi = a.params.ac.max[j];
                expect_coeffs.coeffs[rank * 12 + j] =
                    dequantize_value(quantize_value(v, lo, hi, 10), lo, hi, 10);
            }
        }
        const std::vector<float> expect_ac = reconstruct(a.parsed, expect_coeffs);
        ASSERT_EQ(out.sh_ac, expect_ac) << pca_mode_name(mode);
    }
}

TEST(Disassemble, SecondTripIsAFixedPoint) {
    // Quantization is idempotent, so assembling the decoded cloud again
    // (same ranges, same layout shape) reproduces the identical maps.
    Assembled a = make_assembled(256, 23, 6);
    GaussianCloud out = disassemble(a.maps, a.params, a.parsed);

    AcCoefficients qcoeffs = project(a.parsed, out.sh_ac, out.count, 6);
    // Projection of the reconstruction recovers the dequantized coefficients
    // only for orthonormal bases; quantize directly instead.
    for (std::size_t i = 0; i < qcoeffs.coeffs.size(); ++i) {
        const float lo = a.params.ac.min[i % 6];
        const float hi = a.params.ac.max[i % 6];
        qcoeffs.coeffs[i] = dequantize_value(
            quantize_value(qcoeffs.coeffs[i], lo, hi, 10), lo, hi, 10);
    }

    GridLayout flat = build_layout(out.count);
    AttributeMapSet again = assemble(out, qcoeffs, flat, a.params);
    const AttributeImage* c1 = a.maps.find("coord_hi");
    const AttributeImage* c2 = again.find("coord_hi");
    ASSERT_NE(c1, nullptr);
    ASSERT_NE(c2, nullptr);
    EXPECT_EQ(c1->planes, c2->planes);
    EXPECT_EQ(*a.maps.find("coord_lo"), *again.find("coord_lo"));
}

TEST(Disassemble, ErrorPaths) {
    Assembled a = make_assembled(60, 9, 6);

    AttributeMapSet missing = a.maps;
    missing.images.erase(missing.images.begin() + 3); // drop ac_0
    EXPECT_THROW(disassemble(missing, a.params, a.parsed), ContainerError);

    AttributeMapSet corrupt = a.maps;
    corrupt.images[0].planes[1][5] = 1024;
    EXPECT_THROW(disassemble(corrupt, a.params, a.parsed), IntegrityError);

    AttributeMapSet shrunk = a.maps;
    shrunk.n_real = 70;
    shrunk.side = 8;
    EXPECT_THROW(disassemble(shrunk, a.params, a.parsed), ShapeError);

    AttributeMapSet empty;
    EXPECT_THROW(disassemble(empty, a.params, a.parsed), ShapeError);
}
