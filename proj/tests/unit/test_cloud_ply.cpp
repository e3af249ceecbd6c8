#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>

#include <gtest/gtest.h>

#include "gsmc/cloud.hpp"
#include "gsmc/error.hpp"
#include "gsmc/ply_io.hpp"
#include "gsmc/synthetic.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;
using namespace gsmc;
using gsmc_test::TempDir;
using gsmc_test::random_cloud;

TEST(Cloud, ZerosShape) {
    GaussianCloud c = GaussianCloud::zeros(7);
    EXPECT_EQ(c.count, 7u);
    EXPECT_EQ(c.positions.size(), 21u);
    EXPECT_EQ(c.sh_ac.size(), 7u * 45u);
    EXPECT_EQ(c.rotation.size(), 28u);
    EXPECT_NO_THROW(c.validate());
}

TEST(Cloud, ValidateRejectsBadShapes) {
    GaussianCloud c = GaussianCloud::zeros(3);
    c.opacity.pop_back();
    EXPECT_THROW(c.validate(), DataError);

    GaussianCloud empty;
    EXPECT_THROW(empty.validate(), DataError);

    GaussianCloud nan_cloud = GaussianCloud::zeros(2);
    nan_cloud.sh_ac[17] = std::numeric_limits<float>::quiet_NaN();
    EXPECT_THROW(nan_cloud.validate(), DataError);

    GaussianCloud inf_cloud = GaussianCloud::zeros(2);
    inf_cloud.positions[4] = std::numeric_limits<float>::infinity();
    EXPECT_THROW(inf_cloud.validate(), DataError);
}

TEST(Cloud, ApplyPermutationGathers) {
    GaussianCloud c = random_cloud(4, 11);
    std::vector<std::uint32_t> perm = {2, 0, 3, 1};
    GaussianCloud p = apply_permutation(c, perm);
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t ch = 0; ch < 45; ++ch) {
            EXPECT_EQ(p.sh_ac[i * 45 + ch], c.sh_ac[perm[i] * 45 + ch]);
        }
        EXPECT_EQ(p.opacity[i], c.opacity[perm[i]]);
    }
}

TEST(Cloud, CanonicalOrderIsPermutationInvariant) {
    GaussianCloud c = random_cloud(64, 5);
    std::vector<std::uint32_t> perm(64);
    for (std::uint32_t i = 0; i < 64; ++i) perm[i] = (i * 37 + 11) % 64;
    GaussianCloud shuffled = apply_permutation(c, perm);
    EXPECT_TRUE(canonical_order(c) == canonical_order(shuffled));
}

TEST(PlyIo, RoundtripBitExact) {
    TempDir dir;
    GaussianCloud c = random_cloud(1000, 42);
    c.positions[0] = -0.0f; // sign of zero must survive
    const fs::path p = dir.path / "cloud.ply";
    save_cloud(c, p);
    GaussianCloud back = load_cloud(p);
    EXPECT_TRUE(back == c);
}

TEST(PlyIo, SyntheticRoundtrip) {
    TempDir dir;
    SyntheticConfig cfg;
    cfg.count = 500;
    cfg.seed = 3;
    GaussianCloud c = generate_cloud(cfg);
    const fs::path p = dir.path / "syn.ply";
    save_cloud(c, p);
    EXPECT_TRUE(load_cloud(p) == c);
}

TEST(PlyIo, SkipsNormalsAndExtras) {
    TempDir dir;
    const fs::path p = dir.path / "extras.ply";
    std::ofstream out(p, std::ios::binary);
    out << "ply\nformat binary_little_endian 1.0\nelement vertex 1\n";
    out << "property float x\nproperty float y\nproperty float z\n";
    out << "property float nx\nproperty float ny\nproperty float nz\n";
    for (int i = 0; i < 3; ++i) out << "property float f_dc_" << i << "\n";
    for (int i = 0; i < 45; ++i) out << "property float f_rest_" << i << "\n";
    out << "property float opacity\n";
    for (int i = 0; i < 3; ++i) out << "property float scale_" << i << "\n";
    for (int i = 0; i < 4; ++i) out << "property float rot_" << i << "\n";
    out << "end_header\n";
    float row[62];
    for (int i = 0; i < 62; ++i) row[i] = static_cast<float>(i) * 0.5f;
    out.write(reinterpret_cast<const char*>(row), sizeof(row));
    out.close();

    GaussianCloud c = load_cloud(p);
    ASSERT_EQ(c.count, 1u);
    EXPECT_EQ(c.positions[2], 1.0f);
    EXPECT_EQ(c.sh_dc[0], 3.0f); // normals at indices 3..5 skipped
    EXPECT_EQ(c.sh_ac[44], 26.5f);
    EXPECT_EQ(c.opacity[0], 27.0f);
    EXPECT_EQ(c.rotation[3], 30.5f);
}

TEST(PlyIo, RejectsAsciiFormat) {
    TempDir dir;
    const fs::path p = dir.path / "ascii.ply";
    std::ofstream(p) << "ply\nformat ascii 1.0\nelement vertex 0\nend_header\n";
    EXPECT_THROW(load_cloud(p), SchemaError);
}

TEST(PlyIo, RejectsMissingProperty) {
    TempDir dir;
    const fs::path p = dir.path / "short.ply";
    std::ofstream out(p, std::ios::binary);
    out << "ply\nformat binary_little_endian 1.0\nelement vertex 1\n";
    out << "property float x\nproperty float y\nproperty float z\n";
    out << "end_header\n";
    float xyz[3] = {0, 0, 0};
    out.write(reinterpret_cast<const char*>(xyz), sizeof(xyz));
    out.close();
    EXPECT_THROW(load_cloud(p), SchemaError);
}

TEST(PlyIo, RejectsTruncatedPayload) {
    TempDir dir;
    GaussianCloud c = random_cloud(10, 9);
    const fs::path p = dir.path / "trunc.ply";
    save_cloud(c, p);
    fs::resize_file(p, fs::file_size(p) - 7);
    EXPECT_THROW(load_cloud(p), SchemaError);
}

TEST(PlyIo, RejectsNonFiniteSample) {
    TempDir dir;
    GaussianCloud c = random_cloud(3, 13);
    const fs::path p = dir.path / "nan.ply";
    save_cloud(c, p);
    // Patch one payload float to a NaN bit pattern.
    std::fstream f(p, std::ios::binary | std::ios::in | std::ios::out);
    std::string header;
    std::string line;
    while (std::getline(f, line)) {
        header += line + "\n";
        if (line == "end_header") break;
    }
    const std::uint32_t nan_bits = 0x7fc00000u;
    f.seekp(static_cast<std::streamoff>(header.size()) + 4);
    f.write(reinterpret_cast<const char*>(&nan_bits), 4);
    f.close();
    EXPECT_THROW(load_cloud(p), DataError);
}

TEST(PlyIo, MissingFileIsIoError) {
    EXPECT_THROW(load_cloud("/nonexistent/path/x.ply"), IoError);
}

TEST(Synthetic, DeterministicAndSeedSensitive) {
    SyntheticConfig cfg;
    cfg.count = 200;
    GaussianCloud a = generate_cloud(cfg);
    GaussianCloud b = generate_cloud(cfg);
    EXPECT_TRUE(a == b);
    cfg.seed = 2;
    GaussianCloud c = generate_cloud(cfg);
    EXPECT_FALSE(a == c);
    EXPECT_NO_THROW(c.validate());
    EXPECT_EQ(c.count, 200u);
}
