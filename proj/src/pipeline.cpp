#include "seamstitch/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "seamstitch/ffd_field.hpp"
#include "seamstitch/local_warp.hpp"
#include "seamstitch/match_io.hpp"
#include "seamstitch/render.hpp"

namespace seamstitch {

StageError::StageError(std::string stage, const Error& cause)
    : Error(cause.code(), cause.what(), cause.index()), stage_(std::move(stage)) {}

std::string StageError::tag() const { return "STAGE=" + stage_ + " CODE=" + std::string(to_string(code())); }

namespace {

class StageClock {
public:
    explicit StageClock(PipelineResult& r) : r_(r) {}

    template <typename Fn>
    auto run(const std::string& stage, Fn&& fn) {
        const auto t0 = std::chrono::steady_clock::now();
        try {
            if constexpr (std::is_void_v<decltype(fn())>) {
                fn();
                record(stage, t0);
            } else {
                auto out = fn();
                record(stage, t0);
                return out;
            }
        } catch (const StageError&) {
            throw;
        } catch (const Error& e) {
            throw StageError(stage, e);
        }
    }

private:
    void record(const std::string& stage, std::chrono::steady_clock::time_point t0) {
        const std::chrono::duration<double, std::milli> dt = std::chrono::steady_clock::now() - t0;
        r_.stage_timings_ms.emplace_back(stage, dt.count());
    }

    PipelineResult& r_;
};

void put_pixel(Image& img, int x, int y, std::array<std::uint8_t, 3> rgb) {
    if (x < 0 || y < 0 || x >= int(img.width) || y >= int(img.height)) return;
    for (std::uint32_t c = 0; c < 3; ++c) img.at(std::uint32_t(x), std::uint32_t(y), c) = rgb[c];
}

void draw_line(Image& img, Point2 a, Point2 b, std::array<std::uint8_t, 3> rgb) {
    const double len = std::max(std::abs(b.x - a.x), std::abs(b.y - a.y));
    const int steps = std::max(1, int(std::ceil(len)));
    for (int i = 0; i <= steps; ++i) {
        const double t = double(i) / steps;
        put_pixel(img, int(std::floor(a.x + t * (b.x - a.x))), int(std::floor(a.y + t * (b.y - a.y))), rgb);
    }
}

void draw_dot(Image& img, Point2 p, std::array<std::uint8_t, 3> rgb) {
    const int cx = int(std::floor(p.x));
    const int cy = int(std::floor(p.y));
    for (int dy = -2; dy <= 2; ++dy) {
        for (int dx = -2; dx <= 2; ++dx) put_pixel(img, cx + dx, cy + dy, rgb);
    }
}

// Target where it has coverage, source elsewhere.
Image canvas_preview(const Canvas& canvas) {
    const CanvasFrame& f = canvas.frame;
    Image out(f.width, f.height, 3);
    for (std::uint32_t y = 0; y < f.height; ++y) {
        for (std::uint32_t x = 0; x < f.width; ++x) {
            const Image& from = canvas.target_layer.at(x, y, 3) ? canvas.target_layer : canvas.source_layer;
            for (std::uint32_t c = 0; c < 3; ++c) out.at(x, y, c) = from.at(x, y, c);
        }
    }
    return out;
}

std::vector<double> class_means(const std::vector<DisparityClass>& classes) {
    std::vector<double> m;
    m.reserve(classes.size());
    for (const DisparityClass& c : classes) m.push_back(c.mean_disparity);
    return m;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text)) throw Error(ErrorCode::IoError, "cannot write " + path.string());
}

}  // namespace

PipelineResult run_pipeline(const Image& source_in, const Image& target_in, const std::optional<MatchSet>& matches,
                            const PipelineConfig& cfg, const std::optional<std::filesystem::path>& debug_dir) {
    PipelineResult r;
    StageClock clock(r);
    clock.run("config", [&] { cfg.validate(); });

    const Image source = to_rgb(source_in);
    const Image target = to_rgb(target_in);
    const Dims sdims{source.width, source.height};
    const Dims tdims{target.width, target.height};

    const MatchSet ms = clock.run("matching", [&] {
        if (matches) {
            if (matches->source_dims != sdims || matches->target_dims != tdims) {
                throw Error(ErrorCode::DimensionMismatch, "match file dims differ from the images");
            }
            validate_match_set(*matches);
            return *matches;
        }
        if (cfg.matcher == MatcherKind::File) throw Error(ErrorCode::ConfigError, "matcher kind 'file' needs a match file");
        return detect_and_match_builtin(source, target, cfg.builtin);
    });
    r.match_count = ms.size();

    const RansacResult ransac = clock.run("ransac", [&] { return estimate_affine_ransac(ms, cfg.ransac); });
    r.a_glob = ransac.transform;
    r.inliers = ms.select(ransac.inliers).matches;

    const OverlapGrid grid = clock.run("overlap", [&] { return build_overlap_grid(r.a_glob, sdims, tdims, cfg.warp); });
    const std::vector<LocalFit> fits =
        clock.run("local_fit", [&] { return fit_all_cells(grid, r.inliers, r.a_glob, cfg.warp); });

    ScalarField ramp, density, gate;
    clock.run("field", [&] {
        r.frame = compute_canvas_frame(r.a_glob, sdims, tdims);
        const DeformationLattice lattice = blend_displacement_lattice(fits, grid.cells, r.a_glob, r.frame, cfg.field);
        const DisplacementField disp = regularize_lattice(lattice, cfg.field);
        Polygon on_canvas = grid.overlap_polygon;
        for (Point2& v : on_canvas.vertices) v = r.frame.to_canvas(v);
        const BinaryMask overlap = rasterize_polygon_mask(on_canvas, r.frame.width, r.frame.height);
        ramp = build_ramp(overlap, ramp_bandwidth(tdims, cfg.field));
        std::vector<Point2> pts;
        pts.reserve(r.inliers.size());
        for (const Match& m : r.inliers) pts.push_back(r.frame.to_canvas({m.xt, m.yt}));
        density = build_density_map(pts, r.frame, cfg.field);
        gate = build_gate(ramp, density, cfg.field);
        r.guarded_field = gate_field(disp, gate, cfg.field);
    });

    clock.run("render", [&] {
        r.canvas.frame = r.frame;
        r.canvas.source_layer = warp_source(source, r.a_glob, r.guarded_field, r.frame);
        r.canvas.target_layer = paste_target(target, r.frame);
    });
    r.transformed = clock.run("transform_matches", [&] {
        return transform_match_points(r.inliers, r.a_glob, r.guarded_field, r.frame);
    });

    clock.run("zone", [&] {
        r.classes = classify_disparities(r.transformed.pairs, r.frame.width, cfg.zone);
        try {
            r.zone = score_and_select(cluster_disparities(class_means(r.classes), cfg.zone.v), r.classes, cfg.zone);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NoClusters) throw;
            r.fallbacks.push_back("zone:NoClusters");
            r.zone = fallback_zone(r.classes, r.frame.width, cfg.zone);
        }
    });

    const double midline = 0.5 * (r.zone.zone_x0 + r.zone.zone_x1);
    bool use_midline = false;
    clock.run("chain", [&] {
        std::vector<CanvasPair> zone_pairs;
        for (const CanvasPair& p : r.transformed.pairs) {
            if (p.canvas_src.x >= r.zone.zone_x0 && p.canvas_src.x < r.zone.zone_x1) zone_pairs.push_back(p);
        }
        try {
            r.chain = refine_chain(zone_pairs, to_gray(r.canvas.source_layer), to_gray(r.canvas.target_layer),
                                   cfg.chain.brightness_tol);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::ChainTooShort) throw;
            r.fallbacks.push_back("chain:ChainTooShort");
            use_midline = true;
        }
    });

    clock.run("partition", [&] {
        if (!use_midline) {
            try {
                r.chain = validate_segments(r.chain).chain;
            } catch (const Error& e) {
                if (e.code() != ErrorCode::AllSegmentsInvalid) throw;
                r.fallbacks.push_back("partition:AllSegmentsInvalid");
                use_midline = true;
            }
        }
        if (use_midline) {
            const auto line = zone_midline(r.zone.zone_x0, r.zone.zone_x1, r.frame.height);
            r.chain = KeypointChain{};
            for (const Point2& p : line) {
                r.chain.src_points.push_back(p);
                r.chain.tgt_points.push_back(p);
                r.chain.intensities.push_back(0.0);
                r.chain.pair_index.push_back(0);
            }
            r.plan = partition_at({midline}, r.canvas);
        } else {
            r.plan = partition_slices(r.chain, r.canvas);
        }
    });

    AssembledPanorama assembled = clock.run("compose", [&] {
        return blend_and_assemble(r.canvas, r.plan, cfg.compose.seam_sigma, cfg.compose.seam_band);
    });
    r.panorama = std::move(assembled.image);

    r.report = clock.run("metrics", [&] {
        return overlap_report(r.canvas.source_layer, r.canvas.target_layer, joint_coverage(r.canvas));
    });

    if (debug_dir) {
        clock.run("io", [&] {
            const std::filesystem::path& d = *debug_dir;
            std::filesystem::create_directories(d);
            save_pfm({&r.guarded_field.dx, &r.guarded_field.dy}, d / "displacement_field.pfm");
            save_pfm({&gate}, d / "gate.pfm");
            save_image(field_to_gray8(ramp), d / "ramp.png");
            save_image(field_to_gray8(density), d / "density.png");
            save_image(r.canvas.source_layer, d / "warped_source.png");
            save_image(r.canvas.target_layer, d / "pasted_target.png");

            std::ostringstream csv;
            csv << "x_lo,x_hi,count,mean_disparity\n";
            csv.precision(17);
            for (const DisparityClass& c : r.classes) {
                csv << c.x_lo << ',' << c.x_hi << ',' << c.members.size() << ',' << c.mean_disparity << '\n';
            }
            write_text(d / "disparity_classes.csv", csv.str());
            nlohmann::json zone = {{"zone_x0", r.zone.zone_x0},
                                   {"zone_x1", r.zone.zone_x1},
                                   {"mu_g", r.zone.mu_g},
                                   {"cluster_begin", r.zone.best.classes.begin},
                                   {"cluster_end", r.zone.best.classes.end},
                                   {"score", r.zone.best.score}};
            write_text(d / "zone.json", zone.dump(2) + "\n");

            Image chain_img = canvas_preview(r.canvas);
            for (double x : {r.zone.zone_x0, r.zone.zone_x1}) {
                draw_line(chain_img, {x, 0.0}, {x, double(r.frame.height)}, {255, 255, 0});
            }
            for (std::size_t i = 0; i + 1 < r.chain.size(); ++i) {
                draw_line(chain_img, r.chain.src_points[i], r.chain.src_points[i + 1], {255, 0, 0});
            }
            for (const Point2& p : r.chain.src_points) draw_dot(chain_img, p, {0, 255, 0});
            save_image(chain_img, d / "chain_overlay.png");

            Image slice_img = canvas_preview(r.canvas);
            for (double x : r.plan.boundaries) {
                draw_line(slice_img, {x, 0.0}, {x, double(r.frame.height)}, {255, 0, 255});
            }
            save_image(slice_img, d / "slices_overlay.png");
        });
    }
    return r;
}

std::string report_to_json(const PipelineResult& result) {
    nlohmann::ordered_json j;
    if (std::isinf(result.report.psnr_db)) {
        j["psnr_db"] = "inf";
    } else {
        j["psnr_db"] = result.report.psnr_db;
    }
    j["ssim"] = result.report.ssim;
    j["overlap_pixels"] = result.report.overlap_pixels;
    nlohmann::ordered_json timings = nlohmann::ordered_json::object();
    for (const auto& [stage, ms] : result.stage_timings_ms) timings[stage] = ms;
    j["stage_timings_ms"] = timings;
    j["fallbacks"] = result.fallbacks;
    return j.dump(2) + "\n";
}

std::filesystem::path report_path_for(const std::filesystem::path& out_path) {
    std::filesystem::path p = out_path;
    p.replace_extension(".json");
    return p;
}

PipelineResult run_pipeline_files(const std::filesystem::path& source_path, const std::filesystem::path& target_path,
                                  const std::optional<std::filesystem::path>& matches_path, const PipelineConfig& cfg,
                                  const std::filesystem::path& out_path,
                                  const std::optional<std::filesystem::path>& debug_dir) {
    Image source, target;
    std::optional<MatchSet> matches;
    try {
        source = load_image(source_path);
        target = load_image(target_path);
        if (matches_path) matches = load_match_file(*matches_path);
    } catch (const Error& e) {
        throw StageError("io", e);
    }
    PipelineResult r = run_pipeline(source, target, matches, cfg, debug_dir);
    try {
        save_image(r.panorama, out_path);
        write_text(report_path_for(out_path), report_to_json(r));
    } catch (const Error& e) {
        throw StageError("io", e);
    }
    return r;
}

}  // namespace seamstitch
