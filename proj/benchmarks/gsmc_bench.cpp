#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "gsmc/codec.hpp"
#include "gsmc/maps.hpp"
#include "gsmc/miniplas.hpp"
#include "gsmc/morton.hpp"
#include "gsmc/parallel.hpp"
#include "gsmc/pca.hpp"
#include "gsmc/quantize.hpp"
#include "gsmc/rng.hpp"
#include "gsmc/synthetic.hpp"

namespace {

using namespace gsmc;

GaussianCloud bench_cloud(std::size_t count) {
    SyntheticConfig cfg;
    cfg.count = count;
    cfg.seed = 7;
    return generate_cloud(cfg);
}

struct PreparedCloud {
    GaussianCloud sorted;
    AcCoefficients coeffs;
    QuantizationParams params;
    GridLayout layout;
};

PreparedCloud prepare(std::size_t count, std::uint32_t k) {
    const GaussianCloud cloud = bench_cloud(count);
    PreparedCloud p;
    const PcaModel model = fit_pca(cloud.sh_ac, cloud.count, PcaMode::joint);
    p.coeffs = project(model, cloud.sh_ac, cloud.count, k);
    p.params = compute_ranges(cloud, p.coeffs.coeffs, p.coeffs.k);
    const std::vector<std::uint32_t> perm = sort_by_morton(cloud, p.params);
    p.sorted = apply_permutation(cloud, perm);
    std::vector<float> permuted(p.coeffs.coeffs.size());
    for (std::size_t i = 0; i < perm.size(); ++i) {
        std::copy_n(p.coeffs.coeffs.begin() + std::size_t(perm[i]) * k, k,
                    permuted.begin() + i * k);
    }
    p.coeffs.coeffs = std::move(permuted);
    p.layout = build_layout(p.sorted.count);
    return p;
}

} // namespace

static void Morton3Sort(benchmark::State& state) {
    const GaussianCloud cloud = bench_cloud(std::size_t(state.range(0)));
    const PcaModel model = fit_pca(cloud.sh_ac, cloud.count, PcaMode::joint);
    const AcCoefficients coeffs = project(model, cloud.sh_ac, cloud.count, 12);
    const QuantizationParams params = compute_ranges(cloud, coeffs.coeffs, coeffs.k);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sort_by_morton(cloud, params));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(Morton3Sort)->Arg(10000)->Arg(100000)->Arg(580000)->Unit(benchmark::kMillisecond);

static void Morton2Layout(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_layout(std::uint64_t(state.range(0))));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(Morton2Layout)->Arg(100000)->Arg(580000)->Unit(benchmark::kMillisecond);

static void PcaFit(benchmark::State& state) {
    const GaussianCloud cloud = bench_cloud(std::size_t(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(fit_pca(cloud.sh_ac, cloud.count, PcaMode::joint));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(PcaFit)->Arg(100000)->Arg(580000)->Unit(benchmark::kMillisecond);

static void PcaProject(benchmark::State& state) {
    const GaussianCloud cloud = bench_cloud(std::size_t(state.range(0)));
    const PcaModel model = fit_pca(cloud.sh_ac, cloud.count, PcaMode::joint);
    for (auto _ : state) {
        benchmark::DoNotOptimize(project(model, cloud.sh_ac, cloud.count, 12));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(PcaProject)->Arg(100000)->Arg(580000)->Unit(benchmark::kMillisecond);

static void MiniplasPass(benchmark::State& state) {
    const PreparedCloud p = prepare(std::size_t(state.range(0)), 12);
    const FeatureGrid base = build_feature_grid(p.sorted, p.coeffs, p.layout, p.params);
    for (auto _ : state) {
        state.PauseTiming();
        FeatureGrid grid = base;
        GridLayout layout = p.layout;
        state.ResumeTiming();
        benchmark::DoNotOptimize(optimize_pass(grid, layout, 4, 1, 0, resolve_threads(0)));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(MiniplasPass)->Arg(100000)->Arg(580000)->Unit(benchmark::kMillisecond);

static void InternalLosslessEncode(benchmark::State& state) {
    const PreparedCloud p = prepare(std::size_t(state.range(0)), 12);
    const AttributeMapSet maps = assemble(p.sorted, p.coeffs, p.layout, p.params);
    const CodecBackend backend = CodecBackend::internal();
    std::uint64_t bytes = 0;
    for (auto _ : state) {
        bytes = 0;
        for (const AttributeImage& img : maps.images) {
            bytes += backend.encode_image(img, true, 0).size();
        }
        benchmark::DoNotOptimize(bytes);
    }
    state.counters["bytes"] = double(bytes);
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(InternalLosslessEncode)->Arg(100000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
