#pragma once

#include <cstddef>
#include <vector>

#include "seamstitch/image.hpp"
#include "seamstitch/render.hpp"

namespace seamstitch {

/// Ordered correspondences with strictly increasing canvas_src x.
struct KeypointChain {
    std::vector<Point2> src_points;
    std::vector<Point2> tgt_points;
    std::vector<double> intensities;      // source-layer gray at each src point
    std::vector<std::size_t> pair_index;  // position in the refined input list

    [[nodiscard]] std::size_t size() const { return src_points.size(); }
};

/// Brightness filter (pairwise and against the zone median), then a greedy
/// left-to-right nearest-neighbour walk over canvas_src that keeps x unique.
/// Filter and walk repeat on the surviving set until it stops shrinking.
/// `source_gray` and `target_gray` are the canvas layers in gray.
/// Throws ChainTooShort when fewer than two pairs survive.
KeypointChain refine_chain(const std::vector<CanvasPair>& zone_pairs, const ScalarField& source_gray,
                           const ScalarField& target_gray, double brightness_tol);

/// The chain's source points in order.
std::vector<Point2> stitching_line(const KeypointChain& chain);

/// Vertical midline of [x0, x1) spanning the canvas height.
std::vector<Point2> zone_midline(double x0, double x1, double height);

/// Chain built from already-paired points, keeping the given order.
KeypointChain chain_from_pairs(const std::vector<CanvasPair>& pairs);

/// Converts a chain back to pairs (match_index = position in the chain).
std::vector<CanvasPair> chain_pairs(const KeypointChain& chain);

}  // namespace seamstitch
