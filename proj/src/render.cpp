#include "seamstitch/render.hpp"

#include <algorithm>
#include <cmath>

#include "seamstitch/error.hpp"
#include "seamstitch/imaging.hpp"

namespace seamstitch {

namespace {

constexpr int kMaxIterations = 20;
constexpr double kConvergence = 0.01;
constexpr double kDamping = 0.8;
constexpr double kFootprintSlack = 1e-9;

std::uint8_t to_u8(double v) { return static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0)); }

}  // namespace

CanvasFrame compute_canvas_frame(const AffineTransform& a_glob, Dims source_dims, Dims target_dims) {
    const double sw = source_dims.width;
    const double sh = source_dims.height;
    double x0 = 0.0, y0 = 0.0;
    double x1 = target_dims.width, y1 = target_dims.height;
    for (Point2 c : {Point2{0, 0}, Point2{sw, 0}, Point2{sw, sh}, Point2{0, sh}}) {
        const Point2 p = apply_affine(a_glob, c);
        x0 = std::min(x0, p.x);
        y0 = std::min(y0, p.y);
        x1 = std::max(x1, p.x);
        y1 = std::max(y1, p.y);
    }
    // Snap values within 1e-9 of an integer so exact fits do not grow a pixel.
    const auto snap = [](double v) {
        const double r = std::round(v);
        return std::abs(v - r) < 1e-9 ? r : v;
    };
    const double fx0 = std::floor(snap(x0));
    const double fy0 = std::floor(snap(y0));
    const double cx1 = std::ceil(snap(x1));
    const double cy1 = std::ceil(snap(y1));
    CanvasFrame f;
    f.ox = -fx0;
    f.oy = -fy0;
    f.width = static_cast<std::uint32_t>(cx1 - fx0);
    f.height = static_cast<std::uint32_t>(cy1 - fy0);
    return f;
}

Point2 sampling_map(Point2 u, const AffineTransform& a_inv, const DisplacementField& field, const CanvasFrame& frame) {
    const Point2 base = apply_affine(a_inv, frame.to_target(u));
    return {base.x + sample_bilinear(field.dx, u.x - 0.5, u.y - 0.5),
            base.y + sample_bilinear(field.dy, u.x - 0.5, u.y - 0.5)};
}

Image warp_source(const Image& source, const AffineTransform& a_glob, const DisplacementField& guarded_field,
                  const CanvasFrame& frame) {
    if (guarded_field.width() != frame.width || guarded_field.height() != frame.height) {
        throw Error(ErrorCode::DimensionMismatch, "displacement field does not match the canvas");
    }
    const Image rgb = to_rgb(source);
    const AffineTransform a_inv = invert_affine(a_glob);
    const double max_x = double(rgb.width) - 1.0;
    const double max_y = double(rgb.height) - 1.0;
    Image out(frame.width, frame.height, 4, 0);

    for (std::uint32_t y = 0; y < frame.height; ++y) {
        for (std::uint32_t x = 0; x < frame.width; ++x) {
            const std::size_t k = std::size_t(y) * frame.width + x;
            const Point2 base = apply_affine(a_inv, frame.to_target({x + 0.5, y + 0.5}));
            // Index-space sample position (pixel centers at integers).
            double sx = base.x + guarded_field.dx.values[k] - 0.5;
            double sy = base.y + guarded_field.dy.values[k] - 0.5;
            if (sx < -kFootprintSlack || sy < -kFootprintSlack || sx > max_x + kFootprintSlack ||
                sy > max_y + kFootprintSlack) {
                continue;
            }
            sx = std::clamp(sx, 0.0, max_x);
            sy = std::clamp(sy, 0.0, max_y);
            const auto x0 = static_cast<std::uint32_t>(std::floor(sx));
            const auto y0 = static_cast<std::uint32_t>(std::floor(sy));
            const std::uint32_t x1 = std::min(x0 + 1, rgb.width - 1);
            const std::uint32_t y1 = std::min(y0 + 1, rgb.height - 1);
            const double fx = sx - x0;
            const double fy = sy - y0;
            for (std::uint32_t c = 0; c < 3; ++c) {
                const double top = (1 - fx) * rgb.at(x0, y0, c) + fx * rgb.at(x1, y0, c);
                const double bottom = (1 - fx) * rgb.at(x0, y1, c) + fx * rgb.at(x1, y1, c);
                out.at(x, y, c) = to_u8((1 - fy) * top + fy * bottom);
            }
            out.at(x, y, 3) = 255;
        }
    }
    return out;
}

Image paste_target(const Image& target, const CanvasFrame& frame) {
    const double rx = std::round(frame.ox);
    const double ry = std::round(frame.oy);
    if (rx < 0 || ry < 0 || rx + target.width > frame.width || ry + target.height > frame.height) {
        throw Error(ErrorCode::OffsetOutOfFrame, "target does not fit the canvas at its offset");
    }
    const auto ox = static_cast<std::uint32_t>(rx);
    const auto oy = static_cast<std::uint32_t>(ry);
    const Image rgb = to_rgb(target);
    Image out(frame.width, frame.height, 4, 0);
    for (std::uint32_t y = 0; y < rgb.height; ++y) {
        for (std::uint32_t x = 0; x < rgb.width; ++x) {
            for (std::uint32_t c = 0; c < 3; ++c) out.at(x + ox, y + oy, c) = rgb.at(x, y, c);
            out.at(x + ox, y + oy, 3) = 255;
        }
    }
    return out;
}

TransformedMatches transform_match_points(const std::vector<Match>& inliers, const AffineTransform& a_glob,
                                          const DisplacementField& guarded_field, const CanvasFrame& frame) {
    const AffineTransform a_inv = invert_affine(a_glob);
    const AffineTransform step = AffineTransform(a_glob(0, 0), a_glob(0, 1), 0.0, a_glob(1, 0), a_glob(1, 1), 0.0);
    TransformedMatches out;
    for (std::size_t i = 0; i < inliers.size(); ++i) {
        const Match& m = inliers[i];
        const Point2 p_s{m.xs, m.ys};
        Point2 u = frame.to_canvas(apply_affine(a_glob, p_s));
        bool converged = false;
        for (int it = 0; it <= kMaxIterations; ++it) {
            const Point2 r = sampling_map(u, a_inv, guarded_field, frame) - p_s;
            if (norm(r) < kConvergence) {
                converged = true;
                break;
            }
            if (it == kMaxIterations) break;
            // Inverse Jacobian of the base map is the linear part of A_glob.
            u = u - kDamping * apply_affine(step, r);
        }
        if (!converged) {
            ++out.excluded;
            continue;
        }
        out.pairs.push_back({u, frame.to_canvas({m.xt, m.yt}), i});
    }
    return out;
}

BinaryMask joint_coverage(const Canvas& canvas) {
    const CanvasFrame& f = canvas.frame;
    BinaryMask mask(f.width, f.height);
    for (std::uint32_t y = 0; y < f.height; ++y) {
        for (std::uint32_t x = 0; x < f.width; ++x) {
            mask.set(x, y, canvas.source_layer.at(x, y, 3) != 0 && canvas.target_layer.at(x, y, 3) != 0);
        }
    }
    return mask;
}

}  // namespace seamstitch
