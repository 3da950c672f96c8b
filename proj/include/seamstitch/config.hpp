#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "seamstitch/ffd_field.hpp"
#include "seamstitch/geometry.hpp"
#include "seamstitch/local_warp.hpp"
#include "seamstitch/match_io.hpp"
#include "seamstitch/seam_zone.hpp"

namespace seamstitch {

enum class MatcherKind { Builtin, File };

struct ChainConfig {
    /// Brightness tolerance in 8-bit levels.
    double brightness_tol = 20.0;
};

struct ComposeConfig {
    double seam_sigma = 2.0;
    std::uint32_t seam_band = 8;
};

struct PipelineConfig {
    MatcherKind matcher = MatcherKind::Builtin;
    MatcherConfig builtin;
    RansacConfig ransac;
    WarpConfig warp;
    FieldConfig field;
    ZoneConfig zone;
    ChainConfig chain;
    ComposeConfig compose;
    bool dump_debug = false;

    /// Throws ConfigError.
    void validate() const;
};

/// Parses a config document; absent keys keep their defaults, unknown keys
/// and wrongly typed values throw ConfigError.
PipelineConfig parse_config_json(const std::string& text);
PipelineConfig load_config(const std::filesystem::path& path);

/// Full default set, pretty-printed.
std::string config_to_json(const PipelineConfig& cfg);

std::string_view to_string(MatcherKind kind);

}  // namespace seamstitch
