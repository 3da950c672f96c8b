#pragma once

#include <cstddef>
#include <vector>

#include "seamstitch/canvas.hpp"
#include "seamstitch/image.hpp"

namespace seamstitch {

/// Both layers are RGBA with the frame's size; alpha is 0 or 255.
struct Canvas {
    CanvasFrame frame;
    Image source_layer;
    Image target_layer;
};

/// Canvas pixel u samples the source at Pi(A^-1 [u - o, 1]) + dp(u) with
/// bilinear interpolation; samples whose footprint leaves the source get alpha 0.
Image warp_source(const Image& source, const AffineTransform& a_glob, const DisplacementField& guarded_field,
                  const CanvasFrame& frame);

/// Copies the target at the (integer) canvas offset. Throws OffsetOutOfFrame.
Image paste_target(const Image& target, const CanvasFrame& frame);

/// The source-side sampling map F(u) = Pi(A^-1 [u - o, 1]) + dp(u), with dp
/// bilinearly interpolated. `u` is a continuous canvas position.
Point2 sampling_map(Point2 u, const AffineTransform& a_inv, const DisplacementField& field, const CanvasFrame& frame);

struct CanvasPair {
    Point2 canvas_src;
    Point2 canvas_tgt;
    std::size_t match_index = 0;  // index into the inlier list
};

struct TransformedMatches {
    std::vector<CanvasPair> pairs;
    std::size_t excluded = 0;  // points that did not converge
};

/// Target points shift by the canvas offset; source points are mapped
/// forward by inverting the sampling map with a damped fixed-point iteration.
TransformedMatches transform_match_points(const std::vector<Match>& inliers, const AffineTransform& a_glob,
                                          const DisplacementField& guarded_field, const CanvasFrame& frame);

/// Mask of canvas pixels where both layers have coverage.
BinaryMask joint_coverage(const Canvas& canvas);

}  // namespace seamstitch
