#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "seamstitch/image.hpp"
#include "seamstitch/match.hpp"

namespace seamstitch {

struct MatcherConfig {
    std::uint32_t max_matches = 2000;
    /// Upper bound on keypoints kept per image after non-maximum suppression.
    std::uint32_t max_keypoints = 1500;
    /// FAST intensity threshold (8-bit levels).
    double fast_threshold = 12.0;
    /// Lowe ratio on descriptor distances.
    double ratio = 0.85;
};

/// Corner detection + 16x16 normalized patch descriptors + mutual nearest
/// neighbour with ratio test. Results sorted by descending score, then by
/// source (y, x). Throws ImageTooSmall or NoMatchesFound.
MatchSet detect_and_match_builtin(const Image& source, const Image& target, const MatcherConfig& cfg = {});

/// Parses the match-file JSON:
///   {"source_dims":[W,H],"target_dims":[W,H],
///    "matches":[{"xs":..,"ys":..,"xt":..,"yt":..,"score":..}, ...]}
/// Throws ParseError, or BoundsError carrying the offending index.
MatchSet load_match_file(const std::filesystem::path& path);
MatchSet parse_match_json(const std::string& text);

/// Writes the match-file JSON with 17 significant digits per double.
void save_match_file(const MatchSet& ms, const std::filesystem::path& path);
std::string to_match_json(const MatchSet& ms);

/// Checks coordinates against the stored dims and scores against [0, 1].
/// Throws BoundsError(index) for the first bad entry.
void validate_match_set(const MatchSet& ms);

}  // namespace seamstitch
