#pragma once

#include <filesystem>

#include "gsmc/cloud.hpp"

namespace gsmc {

// Reads a binary little-endian splat PLY. The vertex element must declare
// float properties x, y, z, f_dc_0..2, f_rest_0..44, opacity, scale_0..2,
// rot_0..3; normals (nx, ny, nz) and any other scalar properties are
// skipped. ASCII files are rejected. Non-finite samples are rejected with
// the offending primitive index.
GaussianCloud load_cloud(const std::filesystem::path& path);

// Writes the 59-channel binary little-endian layout (no normals).
// The cloud is validated first; load_cloud(save_cloud(c)) == c bit-exactly.
void save_cloud(const GaussianCloud& cloud, const std::filesystem::path& path);

} // namespace gsmc
