#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "seamstitch/geometry.hpp"
#include "seamstitch/image.hpp"
#include "seamstitch/match.hpp"

namespace seamstitch {

/// A region of the base that moves by an extra horizontal shift in the source view.
struct ParallaxLayer {
    double depth_shift = 0.0;
    Rect region;  // base coordinates
};

/// Base coordinates: the target view is the central view_dims crop of the
/// base. `affine` maps target view points to source view points,
/// p_s = M p_t, and layer points move by an additional (depth_shift, 0).
struct SceneSpec {
    Dims base_dims{800, 600};
    Dims view_dims{640, 480};
    AffineTransform affine;
    std::vector<ParallaxLayer> parallax_layers;  // later entries sit in front
    std::uint64_t texture_seed = 0;
    double noise_sigma = 0.0;
    /// Ground-truth matches are sampled every `match_step` target pixels.
    std::uint32_t match_step = 16;

    /// Throws InvalidSpec.
    void validate() const;
};

struct SyntheticPair {
    Image source;  // RGB
    Image target;  // RGB
    MatchSet ground_truth;
};

/// Renders the procedural texture into both views and samples ground-truth
/// matches on a grid. Points hidden in either view or falling outside the
/// source are skipped.
SyntheticPair generate_pair(const SceneSpec& spec);

/// Procedural RGB texture value at a continuous base position.
std::array<double, 3> texture_at(std::uint64_t seed, double x, double y);

/// Top-most layer whose region holds the base point, or -1 for the static scene.
int layer_at(const SceneSpec& spec, Point2 base_point);

/// Offset of the target crop inside the base.
Point2 crop_offset(const SceneSpec& spec);

}  // namespace seamstitch
