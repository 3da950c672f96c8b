#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "seamstitch/chain.hpp"
#include "seamstitch/compose.hpp"
#include "seamstitch/config.hpp"
#include "seamstitch/error.hpp"
#include "seamstitch/metrics.hpp"
#include "seamstitch/seam_zone.hpp"

namespace seamstitch {

/// An Error tagged with the pipeline stage that raised it.
class StageError : public Error {
public:
    StageError(std::string stage, const Error& cause);

    [[nodiscard]] const std::string& stage() const noexcept { return stage_; }
    /// "STAGE=<stage> CODE=<code>"
    [[nodiscard]] std::string tag() const;

private:
    std::string stage_;
};

struct PipelineResult {
    Image panorama;
    OverlapReport report;
    AffineTransform a_glob;
    std::vector<Match> inliers;
    std::size_t match_count = 0;
    CanvasFrame frame;
    Canvas canvas;
    DisplacementField guarded_field;
    TransformedMatches transformed;
    std::vector<DisparityClass> classes;
    ZoneSelection zone;
    KeypointChain chain;
    PartitionPlan plan;
    std::vector<std::string> fallbacks;
    std::vector<std::pair<std::string, double>> stage_timings_ms;
};

/// Runs every stage on in-memory images. `matches`, when given, replaces
/// match acquisition. Debug artifacts go to `debug_dir` when set.
/// Throws StageError.
PipelineResult run_pipeline(const Image& source, const Image& target, const std::optional<MatchSet>& matches,
                            const PipelineConfig& cfg,
                            const std::optional<std::filesystem::path>& debug_dir = std::nullopt);

/// Report document: psnr_db ("inf" when infinite), ssim, overlap_pixels,
/// stage_timings_ms, fallbacks.
std::string report_to_json(const PipelineResult& result);

/// Reads inputs, runs, writes the panorama to `out_path` and the report to
/// the same path with a .json extension. Throws StageError; input and
/// output failures carry stage "io".
PipelineResult run_pipeline_files(const std::filesystem::path& source_path, const std::filesystem::path& target_path,
                                  const std::optional<std::filesystem::path>& matches_path, const PipelineConfig& cfg,
                                  const std::filesystem::path& out_path,
                                  const std::optional<std::filesystem::path>& debug_dir = std::nullopt);

std::filesystem::path report_path_for(const std::filesystem::path& out_path);

}  // namespace seamstitch
