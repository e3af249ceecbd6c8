#include "gsmc/pca.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <string>

#include "gsmc/error.hpp"

namespace gsmc {

namespace {

constexpr std::size_t kDim = kShAcChannels; // 45
constexpr std::size_t kColorDim = 15;
constexpr std::size_t kRowBlock = 8192;

using MatD = Eigen::MatrixXd;
using VecD = Eigen::VectorXd;

VecD column_mean(const float* data, std::size_t n, std::size_t dim, std::size_t stride,
                 std::size_t offset) {
    VecD acc = VecD::Zero(static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < dim; ++c) {
            acc[static_cast<Eigen::Index>(c)] += data[i * stride + offset + c];
        }
    }
    return acc / static_cast<double>(n);
}

// Covariance with 1/(N-1) normalization, fixed-size row blocks.
MatD covariance(const float* data, std::size_t n, std::size_t dim, std::size_t stride,
                std::size_t offset, const VecD& mean) {
    MatD cov = MatD::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    MatD block(kRowBlock, dim);
    for (std::size_t r0 = 0; r0 < n; r0 += kRowBlock) {
        const std::size_t len = std::min(kRowBlock, n - r0);
        block.resize(static_cast<Eigen::Index>(len), static_cast<Eigen::Index>(dim));
        for (std::size_t i = 0; i < len; ++i) {
            for (std::size_t c = 0; c < dim; ++c) {
                block(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
                    data[(r0 + i) * stride + offset + c] - mean[static_cast<Eigen::Index>(c)];
            }
        }
        cov.noalias() += block.transpose() * block;
    }
    return cov / static_cast<double>(n - 1);
}

void fix_sign(VecD& column) {
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index r = 0; r < column.size(); ++r) {
        const double a = std::abs(column[r]);
        if (a > best) {
            best = a;
            arg = r;
        }
    }
    if (column[arg] < 0.0) column = -column;
}

struct Component {
    double eigenvalue;
    VecD direction; // embedded in the full 45-dim space
};

// Eigen-decomposition of a symmetric covariance block, descending
// eigenvalues, directions embedded at `offset` of the 45-dim space.
std::vector<Component> eigen_components(const MatD& cov, std::size_t offset) {
    Eigen::SelfAdjointEigenSolver<MatD> solver(cov);
    if (solver.info() != Eigen::Success) throw DataError("eigen-decomposition failed");
    const Eigen::Index d = cov.rows();
    std::vector<Component> out;
    out.reserve(static_cast<std::size_t>(d));
    for (Eigen::Index j = d - 1; j >= 0; --j) { // Eigen returns ascending order
        Component c;
        c.eigenvalue = std::max(0.0, solver.eigenvalues()[j]);
        c.direction = VecD::Zero(kDim);
        c.direction.segment(static_cast<Eigen::Index>(offset), d) = solver.eigenvectors().col(j);
        fix_sign(c.direction);
        out.push_back(std::move(c));
    }
    return out;
}

PcaModel assemble_model(PcaMode mode, const VecD& mean, std::vector<Component> components) {
    double total = 0.0;
    for (const auto& c : components) total += c.eigenvalue;

    PcaModel model;
    model.mode = mode;
    model.k = static_cast<std::uint32_t>(kDim);
    model.mean.resize(kDim);
    for (std::size_t c = 0; c < kDim; ++c) {
        model.mean[c] = static_cast<float>(mean[static_cast<Eigen::Index>(c)]);
    }
    model.basis.resize(kDim * kDim);
    model.evr.assign(kDim, 0.0f);
    if (total <= 0.0) {
        // Constant input: identity completion, all variance mass on the
        // first component so the ratios still sum to one.
        for (std::size_t j = 0; j < kDim; ++j) model.basis[j * kDim + j] = 1.0f;
        model.evr[0] = 1.0f;
        return model;
    }
    for (std::size_t j = 0; j < kDim; ++j) {
        const auto& comp = components[j];
        model.evr[j] = static_cast<float>(comp.eigenvalue / total);
        for (std::size_t c = 0; c < kDim; ++c) {
            model.basis[j * kDim + c] =
                static_cast<float>(comp.direction[static_cast<Eigen::Index>(c)]);
        }
    }
    return model;
}

void check_k(std::uint32_t k) {
    if (k == 0 || k > kDim || k % 3 != 0) {
        throw ConfigError("k must be a multiple of 3 in [3, 45], got " + std::to_string(k));
    }
}

void append_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 24));
}

void append_f32(std::vector<std::uint8_t>& out, float f) {
    std::uint32_t u;
    std::memcpy(&u, &f, sizeof(u));
    append_u32(out, u);
}

std::uint32_t read_u32(std::span<const std::uint8_t> b, std::size_t at) {
    return std::uint32_t(b[at]) | std::uint32_t(b[at + 1]) << 8 | std::uint32_t(b[at + 2]) << 16 |
           std::uint32_t(b[at + 3]) << 24;
}

float read_f32(std::span<const std::uint8_t> b, std::size_t at) {
    const std::uint32_t u = read_u32(b, at);
    float f;
    std::memcpy(&f, &u, sizeof(f));
    return f;
}

} // namespace

const char* pca_mode_name(PcaMode mode) {
    switch (mode) {
        case PcaMode::joint: return "joint";
        case PcaMode::per_color: return "per-color";
        case PcaMode::order_clip: return "order-clip";
    }
    return "?";
}

PcaMode pca_mode_from_name(const std::string& name) {
    if (name == "joint") return PcaMode::joint;
    if (name == "per-color" || name == "per_color") return PcaMode::per_color;
    if (name == "order-clip" || name == "order_clip") return PcaMode::order_clip;
    throw ConfigError("unknown PCA mode '" + name + "'");
}

std::size_t order_clip_channel(std::size_t component) {
    return (component % 3) * kColorDim + component / 3;
}

PcaModel fit_pca(const std::vector<float>& sh_ac, std::size_t n, PcaMode mode) {
    if (sh_ac.size() != n * kDim) throw ShapeError("fit_pca: matrix is not N x 45");
    if (n < 1) throw DataError("fit_pca: empty input");

    if (mode == PcaMode::order_clip) {
        PcaModel model;
        model.mode = mode;
        model.k = static_cast<std::uint32_t>(kDim);
        model.mean.assign(kDim, 0.0f);
        model.basis.assign(kDim * kDim, 0.0f);
        for (std::size_t j = 0; j < kDim; ++j) {
            model.basis[j * kDim + order_clip_channel(j)] = 1.0f;
        }
        // Per-channel variance ratios reported in component order.
        model.evr.assign(kDim, 0.0f);
        if (n >= 2) {
            const VecD mean = column_mean(sh_ac.data(), n, kDim, kDim, 0);
            VecD var = VecD::Zero(kDim);
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t c = 0; c < kDim; ++c) {
                    const double d = sh_ac[i * kDim + c] - mean[static_cast<Eigen::Index>(c)];
                    var[static_cast<Eigen::Index>(c)] += d * d;
                }
            }
            const double total = var.sum();
            if (total > 0.0) {
                for (std::size_t j = 0; j < kDim; ++j) {
                    model.evr[j] = static_cast<float>(
                        var[static_cast<Eigen::Index>(order_clip_channel(j))] / total);
                }
                return model;
            }
        }
        model.evr[0] = 1.0f;
        return model;
    }

    if (n < 2) throw DataError("fit_pca: PCA modes need at least 2 primitives");

    if (mode == PcaMode::joint) {
        const VecD mean = column_mean(sh_ac.data(), n, kDim, kDim, 0);
        const MatD cov = covariance(sh_ac.data(), n, kDim, kDim, 0, mean);
        return assemble_model(mode, mean, eigen_components(cov, 0));
    }

    // per_color: independent 15-dim decompositions on the three slices,
    // merged by descending eigenvalue (ties keep slice order).
    VecD mean = VecD::Zero(kDim);
    std::vector<Component> merged;
    merged.reserve(kDim);
    for (std::size_t b = 0; b < 3; ++b) {
        const std::size_t offset = b * kColorDim;
        const VecD m = column_mean(sh_ac.data(), n, kColorDim, kDim, offset);
        mean.segment(static_cast<Eigen::Index>(offset), kColorDim) = m;
        auto comps = eigen_components(covariance(sh_ac.data(), n, kColorDim, kDim, offset, m),
                                      offset);
        for (auto& c : comps) merged.push_back(std::move(c));
    }
    std::stable_sort(merged.begin(), merged.end(), [](const Component& a, const Component& b) {
        return a.eigenvalue > b.eigenvalue;
    });
    return assemble_model(mode, mean, std::move(merged));
}

AcCoefficients project(const PcaModel& model, const std::vector<float>& sh_ac, std::size_t n,
                       std::uint32_t k) {
    check_k(k);
    if (k > model.k) throw ConfigError("project: model retains fewer components than k");
    if (sh_ac.size() != n * kDim) throw ShapeError("project: matrix is not N x 45");

    AcCoefficients out;
    out.k = k;
    out.coeffs.resize(n * k);
    for (std::size_t i = 0; i < n; ++i) {
        const float* row = sh_ac.data() + i * kDim;
        for (std::size_t j = 0; j < k; ++j) {
            const float* col = model.basis.data() + j * kDim;
            double acc = 0.0;
            for (std::size_t c = 0; c < kDim; ++c) {
                acc += (static_cast<double>(row[c]) - model.mean[c]) * col[c];
            }
            out.coeffs[i * k + j] = static_cast<float>(acc);
        }
    }
    return out;
}

std::vector<float> reconstruct(const PcaModel& model, const AcCoefficients& coeffs) {
    const std::uint32_t k = coeffs.k;
    if (k > model.k) throw ShapeError("reconstruct: coefficient k exceeds model components");
    if (coeffs.coeffs.size() % k != 0) throw ShapeError("reconstruct: ragged coefficient matrix");
    const std::size_t n = coeffs.coeffs.size() / k;

    std::vector<float> out(n * kDim);
    for (std::size_t i = 0; i < n; ++i) {
        const float* c = coeffs.coeffs.data() + i * k;
        float* row = out.data() + i * kDim;
        for (std::size_t ch = 0; ch < kDim; ++ch) {
            double acc = model.mean[ch];
            for (std::size_t j = 0; j < k; ++j) {
                acc += static_cast<double>(c[j]) * model.basis[j * kDim + ch];
            }
            row[ch] = static_cast<float>(acc);
        }
    }
    return out;
}

std::vector<std::uint8_t> serialize_model(const PcaModel& model, std::uint32_t k) {
    check_k(k);
    if (k > model.k) throw ConfigError("serialize_model: model retains fewer components than k");

    std::vector<std::uint8_t> out;
    const bool store_basis = model.mode != PcaMode::order_clip;
    out.reserve(8 + 4 * kDim + (store_basis ? 4 * kDim * k : 0));
    append_u32(out, static_cast<std::uint32_t>(model.mode));
    append_u32(out, k);
    for (std::size_t c = 0; c < kDim; ++c) append_f32(out, model.mean[c]);
    if (store_basis) {
        for (std::size_t j = 0; j < k; ++j) {
            for (std::size_t c = 0; c < kDim; ++c) append_f32(out, model.basis[j * kDim + c]);
        }
    }
    return out;
}

PcaModel parse_model(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 8 + 4 * kDim) throw ContainerError("pca metadata block truncated");
    const std::uint32_t mode_raw = read_u32(bytes, 0);
    if (mode_raw > 2) throw ContainerError("pca metadata: unknown mode " + std::to_string(mode_raw));
    const auto mode = static_cast<PcaMode>(mode_raw);
    const std::uint32_t k = read_u32(bytes, 4);
    check_k(k);

    const bool store_basis = mode != PcaMode::order_clip;
    const std::size_t expected = 8 + 4 * kDim + (store_basis ? 4 * kDim * k : 0);
    if (bytes.size() != expected) {
        throw ContainerError("pca metadata block has " + std::to_string(bytes.size()) +
                             " bytes, expected " + std::to_string(expected));
    }

    PcaModel model;
    model.mode = mode;
    model.k = k;
    model.mean.resize(kDim);
    for (std::size_t c = 0; c < kDim; ++c) model.mean[c] = read_f32(bytes, 8 + 4 * c);
    model.basis.assign(kDim * k, 0.0f);
    if (store_basis) {
        const std::size_t base = 8 + 4 * kDim;
        for (std::size_t j = 0; j < k; ++j) {
            for (std::size_t c = 0; c < kDim; ++c) {
                model.basis[j * kDim + c] = read_f32(bytes, base + 4 * (j * kDim + c));
            }
        }
    } else {
        for (std::size_t j = 0; j < k; ++j) model.basis[j * kDim + order_clip_channel(j)] = 1.0f;
    }
    return model;
}

} // namespace gsmc
