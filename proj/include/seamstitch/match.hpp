#pragma once

#include <cstdint>
#include <vector>

namespace seamstitch {

struct Dims {
    std::uint32_t width = 0;
    std::uint32_t height = 0;

    friend bool operator==(const Dims&, const Dims&) = default;
};

/// One correspondence. Coordinates use the pixel-area convention: pixel
/// (i, j) covers [i, i+1) x [j, j+1) and its center is (i + 0.5, j + 0.5).
struct Match {
    double xs = 0.0;
    double ys = 0.0;
    double xt = 0.0;
    double yt = 0.0;
    double score = 0.0;

    friend bool operator==(const Match&, const Match&) = default;
};

struct MatchSet {
    std::vector<Match> matches;
    Dims source_dims;
    Dims target_dims;

    [[nodiscard]] std::size_t size() const noexcept { return matches.size(); }
    [[nodiscard]] bool empty() const noexcept { return matches.empty(); }

    /// Subset in the order of `indices`.
    [[nodiscard]] MatchSet select(const std::vector<std::size_t>& indices) const;

    friend bool operator==(const MatchSet&, const MatchSet&) = default;
};

}  // namespace seamstitch
