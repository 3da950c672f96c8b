#pragma once

#include <cstdint>
#include <vector>

#include "seamstitch/chain.hpp"
#include "seamstitch/render.hpp"

namespace seamstitch {

enum class SliceOwner { SourceOnly, TargetOnly, Blend };

enum class Layer { Source, Target };

/// True when A->B and A'->B' move in the same horizontal direction.
bool segment_direction_valid(double x_a, double x_b, double x_a_prime, double x_b_prime);

struct SegmentPair {
    Point2 a, b;              // consecutive anchors, source side
    Point2 a_prime, b_prime;  // their target-side partners
    bool valid = false;
};

struct SegmentValidation {
    std::vector<SegmentPair> segments;  // every pair examined, in order
    KeypointChain chain;                // chain after dropping rejected anchors
};

/// Checks consecutive anchors; an invalid pair drops its later anchor and the
/// survivor is re-paired with the next one. Throws AllSegmentsInvalid when
/// fewer than two anchors remain.
SegmentValidation validate_segments(const KeypointChain& chain);

struct Slice {
    std::uint32_t col_begin = 0;  // canvas columns [col_begin, col_end)
    std::uint32_t col_end = 0;
    SliceOwner owner = SliceOwner::TargetOnly;
};

struct PartitionPlan {
    std::vector<double> boundaries;  // strictly increasing canvas x
    std::vector<Slice> slices;       // boundaries.size() + 1 entries

    [[nodiscard]] std::size_t slice_count() const { return slices.size(); }
};

/// Slices at the chain's source-side anchor x positions. Throws NoAnchors.
PartitionPlan partition_slices(const KeypointChain& chain, const Canvas& canvas);

/// Slices at explicit boundaries. Throws NoAnchors when empty.
PartitionPlan partition_at(const std::vector<double>& boundaries, const Canvas& canvas);

struct AssembledPanorama {
    Image image;  // RGB, cropped
    std::uint32_t crop_x = 0;
    std::uint32_t crop_y = 0;
    /// Per-pixel source weight on the full canvas (target weight is 1 - w);
    /// negative where neither layer has coverage.
    ScalarField source_weight;
    /// Source weight before seam smoothing.
    ScalarField raw_source_weight;
    Layer leading = Layer::Target;
};

/// Linear alpha transitions inside Blend slices, alternating the left-hand
/// layer from slice to slice, Gaussian smoothing of the transition within
/// +-seam_band px of each boundary, and a crop to the largest fully covered
/// rectangle. Throws CoverageHole.
AssembledPanorama blend_and_assemble(const Canvas& canvas, const PartitionPlan& plan, double seam_sigma,
                                     std::uint32_t seam_band);

struct CropRect {
    std::uint32_t x = 0, y = 0, width = 0, height = 0;
};

/// Largest axis-aligned all-true rectangle.
CropRect largest_covered_rect(const BinaryMask& coverage);

}  // namespace seamstitch
