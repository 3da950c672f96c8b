#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <sys/wait.h>

#include "seamstitch/imaging.hpp"
#include "seamstitch/match_io.hpp"
#include "seamstitch/pipeline.hpp"
#include "seamstitch/synth.hpp"

using namespace seamstitch;
namespace fs = std::filesystem;

namespace {

SyntheticPair scene(const AffineTransform& m, std::uint64_t seed) {
    SceneSpec s;
    s.affine = m;
    s.texture_seed = seed;
    return generate_pair(s);
}

AffineTransform rigid(double tx, double ty, double deg) {
    return AffineTransform::translation(tx, ty) * AffineTransform::rotation(deg * M_PI / 180.0, {320, 240});
}

std::string error_tag(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const StageError& e) {
        return e.tag();
    }
    return "none";
}

struct CliRun {
    int status = -1;
    std::string output;
};

CliRun run_cli(const std::string& args) {
    const std::string cmd = std::string(SEAMSTITCH_CLI) + " " + args + " 2>&1";
    CliRun r;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return r;
    std::array<char, 512> buf{};
    while (fgets(buf.data(), int(buf.size()), p)) r.output += buf.data();
    const int st = pclose(p);
    r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

fs::path scratch(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("seamstitch_test_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

}  // namespace

TEST(Pipeline, IdentitySceneIsANullOperation) {
    const SyntheticPair p = scene(AffineTransform{}, 1);
    const PipelineResult r = run_pipeline(p.source, p.target, p.ground_truth, PipelineConfig{});
    EXPECT_EQ(r.report.psnr_db, kInfinitePsnr);
    EXPECT_LE(r.guarded_field.max_magnitude(), 1e-6);
    ASSERT_EQ(r.panorama.width, p.target.width);
    ASSERT_EQ(r.panorama.height, p.target.height);
    int worst = 0;
    for (std::size_t i = 0; i < p.target.data.size(); ++i) {
        worst = std::max(worst, std::abs(int(r.panorama.data[i]) - int(p.target.data[i])));
    }
    EXPECT_LE(worst, 1);
    EXPECT_TRUE(r.fallbacks.empty());
}

TEST(Pipeline, TranslationSceneAligns) {
    const SyntheticPair p = scene(AffineTransform::translation(40, 0), 2);
    const PipelineResult r = run_pipeline(p.source, p.target, p.ground_truth, PipelineConfig{});
    EXPECT_GE(r.report.psnr_db, 35.0);
    EXPECT_GE(r.report.ssim, 0.95);
    EXPECT_EQ(r.frame.width, 680u);
}

TEST(Pipeline, TransformedMatchesLandOnTheirPartners) {
    const SyntheticPair p = scene(rigid(60, 8, 4.0), 3);
    const PipelineResult r = run_pipeline(p.source, p.target, p.ground_truth, PipelineConfig{});
    ASSERT_GT(r.transformed.pairs.size(), 500u);
    std::size_t close = 0;
    const AffineTransform a_inv = invert_affine(r.a_glob);
    for (const CanvasPair& c : r.transformed.pairs) {
        if (norm(c.canvas_src - c.canvas_tgt) <= 0.1) ++close;
        const Match& m = r.inliers[c.match_index];
        EXPECT_LT(norm(sampling_map(c.canvas_src, a_inv, r.guarded_field, r.frame) - Point2{m.xs, m.ys}), 0.01);
    }
    EXPECT_GE(double(close), 0.95 * double(r.inliers.size()));
}

TEST(Pipeline, ChainVerticesAgreeOnRigidScene) {
    const SyntheticPair p = scene(rigid(50, -6, 2.0), 4);
    const PipelineResult r = run_pipeline(p.source, p.target, p.ground_truth, PipelineConfig{});
    ASSERT_TRUE(r.fallbacks.empty());
    ASSERT_GE(r.chain.size(), 2u);
    for (std::size_t i = 0; i < r.chain.size(); ++i) {
        EXPECT_LE(norm(r.chain.src_points[i] - r.chain.tgt_points[i]), 0.5);
    }
    EXPECT_EQ(r.plan.slice_count(), r.chain.size() + 1);
}

TEST(Pipeline, DeterministicOutputs) {
    const SyntheticPair p = scene(rigid(45, 3, 1.5), 5);
    PipelineConfig cfg;
    const PipelineResult a = run_pipeline(p.source, p.target, std::nullopt, cfg);
    const PipelineResult b = run_pipeline(p.source, p.target, std::nullopt, cfg);
    EXPECT_EQ(a.panorama, b.panorama);
    EXPECT_EQ(a.report.psnr_db, b.report.psnr_db);
    EXPECT_EQ(a.report.ssim, b.report.ssim);
    EXPECT_EQ(a.guarded_field, b.guarded_field);
    auto ja = nlohmann::json::parse(report_to_json(a));
    auto jb = nlohmann::json::parse(report_to_json(b));
    ja.erase("stage_timings_ms");
    jb.erase("stage_timings_ms");
    EXPECT_EQ(ja, jb);
}

TEST(Pipeline, StageTaggedErrors) {
    const SyntheticPair p = scene(AffineTransform::translation(40, 0), 6);
    MatchSet two = p.ground_truth;
    two.matches.resize(2);
    EXPECT_EQ(error_tag([&] { run_pipeline(p.source, p.target, two, PipelineConfig{}); }),
              "STAGE=ransac CODE=TooFewMatches");

    PipelineConfig small;
    small.field.nx = 2;
    EXPECT_EQ(error_tag([&] { run_pipeline(p.source, p.target, p.ground_truth, small); }),
              "STAGE=field CODE=LatticeTooSmall");

    MatchSet wrong = p.ground_truth;
    wrong.source_dims = {100, 100};
    EXPECT_EQ(error_tag([&] { run_pipeline(p.source, p.target, wrong, PipelineConfig{}); }),
              "STAGE=matching CODE=DimensionMismatch");

    PipelineConfig bad;
    bad.zone.lambda = -1.0;
    EXPECT_EQ(error_tag([&] { run_pipeline(p.source, p.target, p.ground_truth, bad); }),
              "STAGE=config CODE=ConfigError");

    EXPECT_EQ(error_tag([&] {
                  run_pipeline_files("/nonexistent/a.png", "/nonexistent/b.png", std::nullopt, PipelineConfig{},
                                     scratch("files") / "pano.png");
              }),
              "STAGE=io CODE=IoError");
}

TEST(Pipeline, ReportDocument) {
    const SyntheticPair p = scene(AffineTransform{}, 7);
    const PipelineResult r = run_pipeline(p.source, p.target, p.ground_truth, PipelineConfig{});
    const auto j = nlohmann::json::parse(report_to_json(r));
    EXPECT_EQ(j.at("psnr_db"), "inf");
    EXPECT_EQ(j.at("ssim"), 1.0);
    EXPECT_EQ(j.at("overlap_pixels"), 640u * 480u);
    EXPECT_TRUE(j.at("fallbacks").is_array());
    for (const char* stage : {"matching", "ransac", "field", "render", "zone", "chain", "compose", "metrics"}) {
        EXPECT_TRUE(j.at("stage_timings_ms").contains(stage)) << stage;
    }
    EXPECT_EQ(report_path_for("out/pano.png"), fs::path("out/pano.json"));
}

TEST(Cli, MissingInputExitsWithIoStatus) {
    const CliRun r = run_cli("stitch --source /nonexistent/a.png --target /nonexistent/b.png --out " +
                          (scratch("cli_missing") / "p.png").string());
    EXPECT_EQ(r.status, 2);
    EXPECT_NE(r.output.find("STAGE=io"), std::string::npos) << r.output;
}

TEST(Cli, SynthStitchAndDebugDump) {
    const fs::path d = scratch("cli_full");
    ASSERT_EQ(run_cli("synth --out " + d.string() + " --seed 4 --tx 48 --ty 5 --rotation 2").status, 0);
    for (const char* f : {"source.png", "target.png", "matches.json"}) EXPECT_TRUE(fs::exists(d / f)) << f;
    const MatchSet gt = load_match_file(d / "matches.json");
    EXPECT_GT(gt.size(), 500u);

    const CliRun st = run_cli("stitch --source " + (d / "source.png").string() + " --target " +
                           (d / "target.png").string() + " --matches " + (d / "matches.json").string() +
                           " --out " + (d / "pano.png").string() + " --dump-debug " + (d / "debug").string());
    ASSERT_EQ(st.status, 0) << st.output;
    EXPECT_TRUE(fs::exists(d / "pano.png"));
    std::ifstream rep(d / "pano.json");
    const auto j = nlohmann::json::parse(rep);
    EXPECT_GE(j.at("psnr_db").get<double>(), 35.0);
    for (const char* f : {"displacement_field.pfm", "gate.pfm", "ramp.png", "density.png", "warped_source.png",
                          "pasted_target.png", "disparity_classes.csv", "zone.json", "chain_overlay.png",
                          "slices_overlay.png"}) {
        EXPECT_TRUE(fs::exists(d / "debug" / f)) << f;
    }
    const Image pano = load_image(d / "pano.png");
    EXPECT_EQ(pano.channels, 3u);

    const CliRun ev = run_cli("eval --source " + (d / "target.png").string() + " --target " +
                           (d / "target.png").string());
    EXPECT_EQ(ev.status, 0);
    EXPECT_NE(ev.output.find("inf"), std::string::npos) << ev.output;
}

TEST(Cli, ConfigInitAndRejection) {
    const fs::path d = scratch("cli_config");
    ASSERT_EQ(run_cli("config init --out " + (d / "c.json").string()).status, 0);
    EXPECT_NO_THROW(load_config(d / "c.json"));
    {
        std::ofstream(d / "bad.json") << R"({"zone": {"bogus": 1}})";
    }
    const CliRun r = run_cli("stitch --source a.png --target b.png --config " + (d / "bad.json").string());
    EXPECT_EQ(r.status, 2);
    EXPECT_NE(r.output.find("CODE=ConfigError"), std::string::npos) << r.output;
    EXPECT_EQ(run_cli("frobnicate").status, 2);
}

TEST(Cli, PipelineFailureExitsWithOne) {
    const fs::path d = scratch("cli_fail");
    ASSERT_EQ(run_cli("synth --out " + d.string() + " --seed 4 --tx 48").status, 0);
    MatchSet ms = load_match_file(d / "matches.json");
    ms.matches.resize(2);
    save_match_file(ms, d / "two.json");
    const CliRun r = run_cli("stitch --source " + (d / "source.png").string() + " --target " +
                          (d / "target.png").string() + " --matches " + (d / "two.json").string() + " --out " +
                          (d / "p.png").string());
    EXPECT_EQ(r.status, 1);
    EXPECT_NE(r.output.find("STAGE=ransac CODE=TooFewMatches"), std::string::npos) << r.output;
}
