#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "gsmc/error.hpp"
#include "gsmc/metrics.hpp"
#include "gsmc/pipeline.hpp"
#include "gsmc/ply_io.hpp"
#include "gsmc/synthetic.hpp"

namespace {

using nlohmann::json;

json stage_json(const std::vector<gsmc::StageTiming>& stages) {
    json arr = json::array();
    for (const auto& s : stages) arr.push_back({{"name", s.name}, {"ms", s.millis}});
    return arr;
}

json encode_report_json(const gsmc::EncodeReport& r) {
    json doc;
    doc["count"] = r.count;
    doc["side"] = r.side;
    doc["k"] = r.k;
    doc["mode"] = gsmc::pca_mode_name(r.mode);
    doc["backend"] = r.backend_id;
    doc["mapgen_ms"] = {{"morton3", r.mapgen.morton3_ms},
                        {"morton2", r.mapgen.morton2_ms},
                        {"pca", r.mapgen.pca_ms},
                        {"miniplas", r.mapgen.miniplas_ms},
                        {"all", r.mapgen.all_ms()}};
    doc["stages"] = stage_json(r.stages);
    doc["evr"] = r.evr;
    json passes = json::array();
    for (const auto& p : r.miniplas.passes) {
        passes.push_back({{"block_size", p.block_size},
                          {"iteration", p.iteration},
                          {"op_count", p.op_count},
                          {"target_cost_before", p.target_cost_before},
                          {"target_cost_after", p.target_cost_after},
                          {"smoothness_after", p.smoothness_after},
                          {"ms", p.millis}});
    }
    doc["miniplas"] = {{"passes", passes},
                       {"smoothness_initial", r.miniplas.smoothness_initial},
                       {"smoothness_final", r.miniplas.smoothness_final},
                       {"boundary_swaps", r.miniplas.boundary_swaps}};
    json images = json::array();
    for (const auto& [tag, bytes] : r.bitrate.image_bytes) {
        images.push_back({{"tag", tag}, {"bytes", bytes}});
    }
    doc["bitrate"] = {{"header_bytes", r.bitrate.header_bytes},
                      {"total_bytes", r.bitrate.total_bytes},
                      {"bpp", r.bitrate.bpp},
                      {"images", images}};
    doc["total_ms"] = r.total_millis;
    return doc;
}

void print_encode_report(const gsmc::EncodeReport& r) {
    std::printf("encoded %" PRIu64 " primitives onto a %u x %u grid (k=%u, mode=%s, backend=%s)\n",
                r.count, r.side, r.side, r.k, gsmc::pca_mode_name(r.mode), r.backend_id.c_str());
    std::printf("\nmap generation (ms)\n");
    std::printf("  %-10s %-10s %-10s %-14s %-10s\n", "morton3", "morton2", "pca", "miniplas",
                "all");
    std::printf("  %-10.1f %-10.1f %-10.1f %-14.1f %-10.1f\n", r.mapgen.morton3_ms,
                r.mapgen.morton2_ms, r.mapgen.pca_ms, r.mapgen.miniplas_ms, r.mapgen.all_ms());
    std::printf("\nstages (ms)\n");
    for (const auto& s : r.stages) std::printf("  %-16s %10.1f\n", s.name.c_str(), s.millis);
    if (!r.miniplas.passes.empty()) {
        std::printf("\nminiplas passes\n");
        for (const auto& p : r.miniplas.passes) {
            std::printf("  B=%-3u it=%u  target %.6g -> %.6g  smoothness %.6g  (%.1f ms)\n",
                        p.block_size, p.iteration, p.target_cost_before, p.target_cost_after,
                        p.smoothness_after, p.millis);
        }
        std::printf("  smoothness %.6g -> %.6g (boundary swaps: %" PRIu64 ")\n",
                    r.miniplas.smoothness_initial, r.miniplas.smoothness_final,
                    r.miniplas.boundary_swaps);
    }
    std::printf("\nbitrate\n");
    for (const auto& [tag, bytes] : r.bitrate.image_bytes) {
        std::printf("  %-10s %12" PRIu64 " bytes\n", tag.c_str(), bytes);
    }
    std::printf("  %-10s %12" PRIu64 " bytes\n", "header", r.bitrate.header_bytes);
    std::printf("  %-10s %12" PRIu64 " bytes   %.3f bpp\n", "total", r.bitrate.total_bytes,
                r.bitrate.bpp);
    std::printf("\ntotal: %.1f ms\n", r.total_millis);
}

json compare_report_json(const gsmc::CompareReport& r) {
    json doc;
    doc["matched"] = r.matched;
    doc["ambiguous"] = r.ambiguous;
    json groups = json::array();
    for (const auto& g : r.groups) {
        json jg = {{"name", g.name}, {"max_error", g.max_error}, {"peak", g.peak}};
        if (std::isfinite(g.psnr)) {
            jg["psnr_db"] = g.psnr;
        } else {
            jg["psnr_db"] = g.psnr > 0 ? "inf" : "-inf";
        }
        groups.push_back(jg);
    }
    doc["groups"] = groups;
    if (std::isfinite(r.attribute_psnr)) {
        doc["attribute_psnr_db"] = r.attribute_psnr;
    } else {
        doc["attribute_psnr_db"] = "inf";
    }
    return doc;
}

void print_compare_report(const gsmc::CompareReport& r) {
    std::printf("matched %" PRIu64 " primitives (%" PRIu64 " ambiguous)\n", r.matched,
                r.ambiguous);
    std::printf("  %-10s %12s %14s %12s\n", "group", "psnr(db)", "max_error", "peak");
    for (const auto& g : r.groups) {
        if (std::isfinite(g.psnr)) {
            std::printf("  %-10s %12.3f %14.6g %12.6g\n", g.name.c_str(), g.psnr, g.max_error,
                        g.peak);
        } else {
            std::printf("  %-10s %12s %14.6g %12.6g\n", g.name.c_str(), g.psnr > 0 ? "inf" : "-inf",
                        g.max_error, g.peak);
        }
    }
    if (std::isfinite(r.attribute_psnr)) {
        std::printf("attribute psnr (range-normalized): %.3f db\n", r.attribute_psnr);
    } else {
        std::printf("attribute psnr (range-normalized): inf\n");
    }
}

json analyze_report_json(const gsmc::AnalyzeReport& r) {
    json doc;
    doc["count"] = r.count;
    doc["side"] = r.side;
    json rows = json::array();
    for (const auto& row : r.rows) {
        rows.push_back(
            {{"layout", row.layout}, {"smoothness", row.smoothness}, {"bytes", row.bytes}});
    }
    doc["layouts"] = rows;
    json curves = json::array();
    for (const auto& c : r.curves) curves.push_back({{"mode", c.mode}, {"evr", c.evr}});
    doc["evr_curves"] = curves;
    return doc;
}

void print_analyze_report(const gsmc::AnalyzeReport& r) {
    std::printf("layout study over %" PRIu64 " primitives (grid %u x %u)\n", r.count, r.side,
                r.side);
    std::printf("  %-24s %14s %14s\n", "layout", "smoothness", "coded bytes");
    for (const auto& row : r.rows) {
        std::printf("  %-24s %14.6g %14" PRIu64 "\n", row.layout.c_str(), row.smoothness,
                    row.bytes);
    }
    std::printf("\nexplained variance (cumulative at k = 3, 12, 24, 45)\n");
    for (const auto& c : r.curves) {
        double cum = 0.0;
        std::string line;
        std::size_t next = 0;
        const std::size_t marks[] = {3, 12, 24, 45};
        for (std::size_t i = 0; i < c.evr.size(); ++i) {
            cum += c.evr[i];
            if (next < 4 && i + 1 == marks[next]) {
                char buf[32];
                std::snprintf(buf, sizeof buf, " %.4f", cum);
                line += buf;
                ++next;
            }
        }
        std::printf("  %-10s%s\n", c.mode.c_str(), line.c_str());
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"3D Gaussian Splatting map compression toolkit"};
    app.require_subcommand(1);
    app.fallthrough();

    bool as_json = false;
    app.add_flag("--json", as_json, "emit machine-readable JSON reports");

    gsmc::EncodeConfig config;
    std::string in_path, out_path, ref_path, dec_path, mode_name = "joint";

    auto add_encode_flags = [&](CLI::App* cmd) {
        cmd->add_option("-k,--k", config.k, "retained PCA coefficients (multiple of 3)")
            ->default_val(12);
        cmd->add_option("--mode", mode_name, "joint | per_color | order_clip")
            ->default_val("joint");
        cmd->add_option("--mbs", config.mbs, "max MiniPLAS block size (0 disables)")
            ->default_val(4);
        cmd->add_option("--iterations", config.iterations, "MiniPLAS iterations per block size")
            ->default_val(1);
        cmd->add_option("--seed", config.seed, "seed for the layout refinement")->default_val(0);
        cmd->add_option("--threads", config.threads, "worker threads (0 = all cores)")
            ->default_val(0);
        cmd->add_option("--backend", config.backend_config,
                        "external codec config JSON (default: GSMC_BACKEND env or internal)");
        cmd->add_option("--weight-positions", config.weights.positions, "")->group("");
        cmd->add_option("--weight-sh-dc", config.weights.sh_dc, "")->group("");
        cmd->add_option("--weight-ac", config.weights.ac, "")->group("");
        cmd->add_option("--weight-opacity", config.weights.opacity, "")->group("");
        cmd->add_option("--weight-scale", config.weights.scale, "")->group("");
        cmd->add_option("--weight-rotation", config.weights.rotation, "")->group("");
    };

    CLI::App* encode = app.add_subcommand("encode", "compress a 3DGS PLY into a container");
    encode->add_option("-i,--in", in_path, "input PLY")->required();
    encode->add_option("-o,--out", out_path, "output container")->required();
    add_encode_flags(encode);
    encode->add_option("--qp", config.qp, "attribute-image qp (0 = lossless)")->default_val(0);

    CLI::App* decode = app.add_subcommand("decode", "reconstruct a PLY from a container");
    decode->add_option("-i,--in", in_path, "input container")->required();
    decode->add_option("-o,--out", out_path, "output PLY")->required();
    decode->add_option("--backend", config.backend_config, "external codec config JSON");
    decode->add_option("--threads", config.threads, "worker threads (0 = all cores)")
        ->default_val(0);

    CLI::App* compare = app.add_subcommand("compare", "attribute PSNR between two PLY files");
    compare->add_option("reference", ref_path, "reference PLY")->required();
    compare->add_option("decoded", dec_path, "decoded PLY")->required();

    CLI::App* analyze = app.add_subcommand("analyze", "layout and PCA ablation study");
    analyze->add_option("-i,--in", in_path, "input PLY")->required();
    add_encode_flags(analyze);

    gsmc::SyntheticConfig syn;
    CLI::App* gen = app.add_subcommand("gen", "write a deterministic synthetic cloud");
    gen->add_option("-o,--out", out_path, "output PLY")->required();
    gen->add_option("-n,--count", syn.count, "primitive count")->capture_default_str();
    gen->add_option("--seed", syn.seed, "generator seed")->capture_default_str();
    gen->add_option("--clusters", syn.clusters, "cluster count")->capture_default_str();
    gen->add_option("--box", syn.box, "half-extent of the scene")->capture_default_str();
    gen->add_option("--spread", syn.cluster_spread, "cluster sigma / box")->capture_default_str();
    gen->add_option("--ac-rank", syn.ac_rank, "latent rank of the AC field")
        ->capture_default_str();
    gen->add_option("--ac-noise", syn.ac_noise, "AC noise sigma")->capture_default_str();
    gen->add_option("--attr-noise", syn.attr_noise, "non-AC attribute noise sigma")
        ->capture_default_str();
    gen->add_option("--field-freq", syn.field_freq, "attribute field frequency multiplier")
        ->capture_default_str();
    gen->add_option("--cluster-attr", syn.cluster_attr, "per-cluster attribute offset scale")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : gsmc::exit_code(gsmc::ErrorClass::config);
    }

    try {
        config.mode = gsmc::pca_mode_from_name(mode_name);
        if (encode->parsed()) {
            const gsmc::EncodeReport report = gsmc::cmd_encode(in_path, config, out_path);
            if (as_json) {
                std::printf("%s\n", encode_report_json(report).dump(2).c_str());
            } else {
                print_encode_report(report);
            }
        } else if (decode->parsed()) {
            const gsmc::DecodeReport report =
                gsmc::cmd_decode(in_path, out_path, config.backend_config, config.threads);
            if (as_json) {
                json doc = {{"count", report.count},
                            {"side", report.side},
                            {"k", report.k},
                            {"backend", report.backend_id},
                            {"total_ms", report.total_millis}};
                std::printf("%s\n", doc.dump(2).c_str());
            } else {
                std::printf("decoded %" PRIu64 " primitives (k=%u, backend=%s) in %.1f ms\n",
                            report.count, report.k, report.backend_id.c_str(),
                            report.total_millis);
            }
        } else if (compare->parsed()) {
            const gsmc::GaussianCloud a = gsmc::load_cloud(ref_path);
            const gsmc::GaussianCloud b = gsmc::load_cloud(dec_path);
            const gsmc::CompareReport report = gsmc::compare_clouds(a, b);
            if (as_json) {
                std::printf("%s\n", compare_report_json(report).dump(2).c_str());
            } else {
                print_compare_report(report);
            }
        } else if (analyze->parsed()) {
            const gsmc::GaussianCloud cloud = gsmc::load_cloud(in_path);
            const gsmc::AnalyzeReport report = gsmc::analyze_cloud(cloud, config);
            if (as_json) {
                std::printf("%s\n", analyze_report_json(report).dump(2).c_str());
            } else {
                print_analyze_report(report);
            }
        } else if (gen->parsed()) {
            const gsmc::GaussianCloud cloud = gsmc::generate_cloud(syn);
            gsmc::save_cloud(cloud, out_path);
            if (as_json) {
                json doc = {{"count", cloud.count}, {"path", out_path}};
                std::printf("%s\n", doc.dump(2).c_str());
            } else {
                std::printf("wrote %zu primitives to %s\n", cloud.count, out_path.c_str());
            }
        }
    } catch (const gsmc::Error& e) {
        std::fprintf(stderr, "error [%s]: %s\n", gsmc::class_name(e.cls()), e.what());
        return gsmc::exit_code(e.cls());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
