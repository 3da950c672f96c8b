#include "seamstitch/compose.hpp"

#include <algorithm>
#include <cmath>

#include "seamstitch/error.hpp"
#include "seamstitch/imaging.hpp"

namespace seamstitch {

bool segment_direction_valid(double x_a, double x_b, double x_a_prime, double x_b_prime) {
    return (x_a > x_b && x_a_prime > x_b_prime) || (x_a < x_b && x_a_prime < x_b_prime);
}

SegmentValidation validate_segments(const KeypointChain& chain) {
    if (chain.size() < 2) throw Error(ErrorCode::AllSegmentsInvalid, "need at least two anchors");
    SegmentValidation out;
    std::vector<std::size_t> kept{0};
    for (std::size_t i = 1; i < chain.size(); ++i) {
        const std::size_t a = kept.back();
        SegmentPair seg{chain.src_points[a], chain.src_points[i], chain.tgt_points[a], chain.tgt_points[i], false};
        seg.valid = segment_direction_valid(seg.a.x, seg.b.x, seg.a_prime.x, seg.b_prime.x);
        out.segments.push_back(seg);
        if (seg.valid) kept.push_back(i);
    }
    if (kept.size() < 2) throw Error(ErrorCode::AllSegmentsInvalid, "every segment failed directional validation");
    for (std::size_t i : kept) {
        out.chain.src_points.push_back(chain.src_points[i]);
        out.chain.tgt_points.push_back(chain.tgt_points[i]);
        out.chain.intensities.push_back(chain.intensities[i]);
        out.chain.pair_index.push_back(chain.pair_index[i]);
    }
    return out;
}

namespace {

bool covered(const Image& layer, std::uint32_t x, std::uint32_t y) { return layer.at(x, y, 3) != 0; }

std::uint32_t column_for(double boundary, std::uint32_t width) {
    // First column whose center x + 0.5 is at or right of the boundary.
    const double c = std::ceil(boundary - 0.5);
    return static_cast<std::uint32_t>(std::clamp(c, 0.0, double(width)));
}

}  // namespace

PartitionPlan partition_at(const std::vector<double>& boundaries, const Canvas& canvas) {
    if (boundaries.empty()) throw Error(ErrorCode::NoAnchors, "partition needs at least one anchor");
    for (std::size_t i = 1; i < boundaries.size(); ++i) {
        if (!(boundaries[i] > boundaries[i - 1])) {
            throw Error(ErrorCode::NoAnchors, "anchor x positions must be strictly increasing");
        }
    }
    const CanvasFrame& f = canvas.frame;
    PartitionPlan plan;
    plan.boundaries = boundaries;
    std::uint32_t begin = 0;
    for (std::size_t k = 0; k <= boundaries.size(); ++k) {
        const std::uint32_t end = k < boundaries.size() ? std::max(begin, column_for(boundaries[k], f.width)) : f.width;
        Slice s{begin, end, SliceOwner::TargetOnly};
        bool any_src = false, any_dual = false;
        for (std::uint32_t y = 0; y < f.height && !any_dual; ++y) {
            for (std::uint32_t x = begin; x < end; ++x) {
                const bool cs = covered(canvas.source_layer, x, y);
                const bool ct = covered(canvas.target_layer, x, y);
                if (cs && ct) {
                    any_dual = true;
                    break;
                }
                any_src = any_src || cs;
            }
        }
        s.owner = any_dual ? SliceOwner::Blend : (any_src ? SliceOwner::SourceOnly : SliceOwner::TargetOnly);
        plan.slices.push_back(s);
        begin = end;
    }
    return plan;
}

PartitionPlan partition_slices(const KeypointChain& chain, const Canvas& canvas) {
    std::vector<double> xs;
    xs.reserve(chain.size());
    for (const Point2& p : chain.src_points) xs.push_back(p.x);
    return partition_at(xs, canvas);
}

CropRect largest_covered_rect(const BinaryMask& coverage) {
    const std::uint32_t w = coverage.width();
    const std::uint32_t h = coverage.height();
    std::vector<std::uint32_t> heights(w, 0);
    std::vector<std::uint32_t> stack;
    CropRect best;
    std::uint64_t best_area = 0;
    for (std::uint32_t y = 0; y < h; ++y) {
        for (std::uint32_t x = 0; x < w; ++x) heights[x] = coverage.at(x, y) ? heights[x] + 1 : 0;
        // Largest rectangle in the histogram ending at row y.
        stack.clear();
        for (std::uint32_t x = 0; x <= w; ++x) {
            const std::uint32_t cur = x < w ? heights[x] : 0;
            while (!stack.empty() && heights[stack.back()] >= cur) {
                const std::uint32_t top = heights[stack.back()];
                stack.pop_back();
                const std::uint32_t left = stack.empty() ? 0 : stack.back() + 1;
                const std::uint64_t area = std::uint64_t(top) * (x - left);
                if (area > best_area) {
                    best_area = area;
                    best = {left, y + 1 - top, x - left, top};
                }
            }
            if (x < w) stack.push_back(x);
        }
    }
    return best;
}

AssembledPanorama blend_and_assemble(const Canvas& canvas, const PartitionPlan& plan, double seam_sigma,
                                     std::uint32_t seam_band) {
    const CanvasFrame& f = canvas.frame;
    const Image& src = canvas.source_layer;
    const Image& tgt = canvas.target_layer;
    if (plan.slices.empty()) throw Error(ErrorCode::NoAnchors, "empty partition plan");

    // Leading layer: whichever covers more of the area left of the first anchor on its own.
    std::size_t src_only = 0, tgt_only = 0;
    const std::uint32_t first_end = plan.slices.front().col_end;
    for (std::uint32_t y = 0; y < f.height; ++y) {
        for (std::uint32_t x = 0; x < first_end; ++x) {
            const bool cs = covered(src, x, y);
            const bool ct = covered(tgt, x, y);
            if (cs && !ct) ++src_only;
            if (ct && !cs) ++tgt_only;
        }
    }
    AssembledPanorama out;
    out.leading = src_only > tgt_only ? Layer::Source : Layer::Target;

    constexpr float kUncovered = -1.0f;
    ScalarField weight(f.width, f.height, kUncovered);
    for (std::uint32_t y = 0; y < f.height; ++y) {
        for (std::uint32_t x = 0; x < f.width; ++x) {
            const bool cs = covered(src, x, y);
            const bool ct = covered(tgt, x, y);
            if (cs != ct) weight.at(x, y) = cs ? 1.0f : 0.0f;
        }
    }

    Layer left_layer = out.leading;
    for (const Slice& s : plan.slices) {
        if (s.owner != SliceOwner::Blend) continue;
        // Ramp across the columns of this slice that hold dual coverage.
        std::uint32_t lo = s.col_end, hi = s.col_begin;
        for (std::uint32_t x = s.col_begin; x < s.col_end; ++x) {
            for (std::uint32_t y = 0; y < f.height; ++y) {
                if (covered(src, x, y) && covered(tgt, x, y)) {
                    lo = std::min(lo, x);
                    hi = std::max(hi, x);
                    break;
                }
            }
        }
        const double span = double(hi - lo + 1);
        for (std::uint32_t x = s.col_begin; x < s.col_end; ++x) {
            const double t = std::clamp((double(x) - double(lo)) / span, 0.0, 1.0);
            const double w_left = 1.0 - t;
            const auto w_src = static_cast<float>(left_layer == Layer::Source ? w_left : 1.0 - w_left);
            for (std::uint32_t y = 0; y < f.height; ++y) {
                if (covered(src, x, y) && covered(tgt, x, y)) weight.at(x, y) = w_src;
            }
        }
        left_layer = left_layer == Layer::Source ? Layer::Target : Layer::Source;
    }
    out.raw_source_weight = weight;

    if (seam_sigma > 0.0 && seam_band > 0) {
        ScalarField filled = weight;
        for (float& v : filled.values) {
            if (v < 0.0f) v = 0.5f;
        }
        const ScalarField blurred = gaussian_blur(filled, seam_sigma);
        for (double b : plan.boundaries) {
            const double x_lo = std::max(0.0, std::ceil(b - 0.5 - seam_band));
            const double x_hi = std::min(double(f.width), std::floor(b - 0.5 + seam_band) + 1.0);
            for (auto x = static_cast<std::uint32_t>(x_lo); double(x) < x_hi; ++x) {
                for (std::uint32_t y = 0; y < f.height; ++y) {
                    if (covered(src, x, y) && covered(tgt, x, y)) {
                        weight.at(x, y) = std::clamp(blurred.at(x, y), 0.0f, 1.0f);
                    }
                }
            }
        }
    }
    out.source_weight = weight;

    BinaryMask coverage(f.width, f.height);
    for (std::uint32_t y = 0; y < f.height; ++y) {
        for (std::uint32_t x = 0; x < f.width; ++x) coverage.set(x, y, weight.at(x, y) >= 0.0f);
    }
    const CropRect crop = largest_covered_rect(coverage);
    if (crop.width == 0 || crop.height == 0) throw Error(ErrorCode::CoverageHole, "canvas has no covered pixel");
    out.crop_x = crop.x;
    out.crop_y = crop.y;
    out.image = Image(crop.width, crop.height, 3);
    for (std::uint32_t y = 0; y < crop.height; ++y) {
        for (std::uint32_t x = 0; x < crop.width; ++x) {
            const std::uint32_t cx = x + crop.x;
            const std::uint32_t cy = y + crop.y;
            const double w = weight.at(cx, cy);
            if (w < 0.0) throw Error(ErrorCode::CoverageHole, "uncovered pixel inside the crop");
            for (std::uint32_t c = 0; c < 3; ++c) {
                const double v = w * src.at(cx, cy, c) + (1.0 - w) * tgt.at(cx, cy, c);
                out.image.at(x, y, c) = static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
            }
        }
    }
    return out;
}

}  // namespace seamstitch
