#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "seamstitch/config.hpp"
#include "seamstitch/match_io.hpp"
#include "seamstitch/metrics.hpp"
#include "seamstitch/pipeline.hpp"
#include "seamstitch/synth.hpp"

namespace fs = std::filesystem;
using namespace seamstitch;

namespace {

constexpr int kOk = 0;
constexpr int kPipelineError = 1;
constexpr int kIoError = 2;

int report_error(const std::string& stage, const Error& e) {
    std::cerr << "STAGE=" << stage << " CODE=" << to_string(e.code());
    if (e.index()) std::cerr << " INDEX=" << *e.index();
    std::cerr << ": " << e.what() << "\n";
    const bool io = stage == "io" || stage == "config" || e.code() == ErrorCode::IoError ||
                    e.code() == ErrorCode::ConfigError;
    return io ? kIoError : kPipelineError;
}

PipelineConfig config_or_default(const std::string& path) {
    return path.empty() ? PipelineConfig{} : load_config(path);
}

struct StitchArgs {
    std::string source, target, matches, config, out = "panorama.png", debug;
    std::optional<std::uint64_t> seed;
};

int run_stitch(const StitchArgs& a) {
    PipelineConfig cfg;
    try {
        cfg = config_or_default(a.config);
    } catch (const Error& e) {
        return report_error("config", e);
    }
    if (a.seed) cfg.ransac.rng_seed = *a.seed;
    if (!a.matches.empty()) cfg.matcher = MatcherKind::File;
    std::optional<fs::path> matches;
    if (!a.matches.empty()) matches = a.matches;
    std::optional<fs::path> debug;
    if (!a.debug.empty()) {
        debug = a.debug;
    } else if (cfg.dump_debug) {
        debug = fs::path(a.out).parent_path() / "debug";
    }
    try {
        const PipelineResult r = run_pipeline_files(a.source, a.target, matches, cfg, a.out, debug);
        std::cout << report_to_json(r);
    } catch (const StageError& e) {
        return report_error(e.stage(), e);
    }
    return kOk;
}

struct SynthArgs {
    std::string out = "synth";
    std::uint64_t seed = 0;
    double tx = 40.0, ty = 0.0, rotation_deg = 0.0, scale = 1.0, noise = 0.0;
    std::vector<double> layer;  // shift x0 y0 x1 y1, repeated
    std::uint32_t width = 640, height = 480, step = 16;
};

int run_synth(const SynthArgs& a) {
    SceneSpec spec;
    spec.view_dims = {a.width, a.height};
    spec.base_dims = {a.width + a.width / 4, a.height + a.height / 4};
    const Point2 center{a.width / 2.0, a.height / 2.0};
    spec.affine = AffineTransform::translation(a.tx, a.ty) *
                  AffineTransform::rotation(a.rotation_deg * 3.14159265358979323846 / 180.0, center) *
                  AffineTransform::translation(center.x, center.y) * AffineTransform::scaling(a.scale, a.scale) *
                  AffineTransform::translation(-center.x, -center.y);
    spec.texture_seed = a.seed;
    spec.noise_sigma = a.noise;
    spec.match_step = a.step;
    if (a.layer.size() % 5 != 0) {
        std::cerr << "STAGE=config CODE=ConfigError: --layer takes shift x0 y0 x1 y1\n";
        return kIoError;
    }
    for (std::size_t i = 0; i < a.layer.size(); i += 5) {
        spec.parallax_layers.push_back({a.layer[i], {a.layer[i + 1], a.layer[i + 2], a.layer[i + 3], a.layer[i + 4]}});
    }
    SyntheticPair pair;
    try {
        pair = generate_pair(spec);
    } catch (const Error& e) {
        return report_error("synth", e);
    }
    try {
        const fs::path dir = a.out;
        fs::create_directories(dir);
        save_image(pair.source, dir / "source.png");
        save_image(pair.target, dir / "target.png");
        save_match_file(pair.ground_truth, dir / "matches.json");
    } catch (const Error& e) {
        return report_error("io", e);
    }
    std::cout << "wrote " << pair.ground_truth.size() << " ground-truth matches to " << a.out << "\n";
    return kOk;
}

int run_eval(const std::string& a_path, const std::string& b_path) {
    Image a, b;
    try {
        a = to_rgb(load_image(a_path));
        b = to_rgb(load_image(b_path));
    } catch (const Error& e) {
        return report_error("io", e);
    }
    try {
        if (a.width != b.width || a.height != b.height) {
            throw Error(ErrorCode::DimensionMismatch, "images differ in size");
        }
        const OverlapReport r = overlap_report(a, b, BinaryMask(a.width, a.height, true));
        nlohmann::ordered_json j;
        if (std::isinf(r.psnr_db)) {
            j["psnr_db"] = "inf";
        } else {
            j["psnr_db"] = r.psnr_db;
        }
        j["ssim"] = r.ssim;
        j["overlap_pixels"] = r.overlap_pixels;
        std::cout << j.dump(2) << "\n";
    } catch (const Error& e) {
        return report_error("metrics", e);
    }
    return kOk;
}

int run_config_init(const std::string& out) {
    const std::string text = config_to_json(PipelineConfig{});
    if (out.empty()) {
        std::cout << text;
        return kOk;
    }
    std::ofstream f(out, std::ios::binary);
    if (!f || !(f << text)) {
        std::cerr << "STAGE=io CODE=IoError: cannot write " << out << "\n";
        return kIoError;
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Image-pair stitching with guarded local warps and anchor-based seams"};
    app.require_subcommand(1);

    StitchArgs stitch;
    auto* s = app.add_subcommand("stitch", "Stitch a source image onto a target image");
    s->add_option("--source", stitch.source, "Source image")->required();
    s->add_option("--target", stitch.target, "Target image")->required();
    s->add_option("--matches", stitch.matches, "Match file (skips the built-in matcher)");
    s->add_option("--config", stitch.config, "Config JSON");
    s->add_option("--out", stitch.out, "Output panorama PNG; the report goes next to it as .json");
    s->add_option("--dump-debug", stitch.debug, "Directory for intermediate artifacts");
    s->add_option("--seed", stitch.seed, "RANSAC seed");

    SynthArgs synth;
    auto* y = app.add_subcommand("synth", "Render a synthetic pair with ground-truth matches");
    y->add_option("--out", synth.out, "Output directory");
    y->add_option("--seed", synth.seed, "Texture seed");
    y->add_option("--tx", synth.tx, "Horizontal motion, source = motion(target)");
    y->add_option("--ty", synth.ty, "Vertical motion");
    y->add_option("--rotation", synth.rotation_deg, "Rotation in degrees about the view center");
    y->add_option("--scale", synth.scale, "Scale about the view center");
    y->add_option("--noise", synth.noise, "Gaussian noise sigma");
    y->add_option("--layer", synth.layer, "Parallax layer: shift x0 y0 x1 y1 (base coordinates)");
    y->add_option("--width", synth.width, "View width");
    y->add_option("--height", synth.height, "View height");
    y->add_option("--step", synth.step, "Ground-truth grid step");

    std::string eval_a, eval_b;
    auto* e = app.add_subcommand("eval", "PSNR and SSIM between two equally sized images");
    e->add_option("--source", eval_a, "First image")->required();
    e->add_option("--target", eval_b, "Second image")->required();

    std::string init_out;
    auto* c = app.add_subcommand("config", "Configuration helpers");
    c->require_subcommand(1);
    auto* ci = c->add_subcommand("init", "Print or write the default configuration");
    ci->add_option("--out", init_out, "Write to this file instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int rc = app.exit(err);
        return rc == 0 ? kOk : kIoError;
    }

    if (*s) return run_stitch(stitch);
    if (*y) return run_synth(synth);
    if (*e) return run_eval(eval_a, eval_b);
    if (*ci) return run_config_init(init_out);
    return kIoError;
}
