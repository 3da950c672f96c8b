#pragma once

#include <cstdint>

#include "seamstitch/geometry.hpp"
#include "seamstitch/match.hpp"

namespace seamstitch {

/// Output canvas. Canvas coordinates are target coordinates shifted by the
/// integer offset (ox, oy): u = p_t + o.
struct CanvasFrame {
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    double ox = 0.0;
    double oy = 0.0;

    [[nodiscard]] Point2 offset() const { return {ox, oy}; }
    [[nodiscard]] Point2 to_canvas(Point2 target_point) const { return {target_point.x + ox, target_point.y + oy}; }
    [[nodiscard]] Point2 to_target(Point2 canvas_point) const { return {canvas_point.x - ox, canvas_point.y - oy}; }

    friend bool operator==(const CanvasFrame&, const CanvasFrame&) = default;
};

/// Axis-aligned bbox of the target frame and the projected source corners,
/// rounded outward to whole pixels.
CanvasFrame compute_canvas_frame(const AffineTransform& a_glob, Dims source_dims, Dims target_dims);

}  // namespace seamstitch
