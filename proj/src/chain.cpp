#include "seamstitch/chain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "seamstitch/error.hpp"
#include "seamstitch/imaging.hpp"

namespace seamstitch {

namespace {

double gray_at(const ScalarField& g, Point2 p) { return sample_bilinear(g, p.x - 0.5, p.y - 0.5); }

double median(std::vector<double> v) {
    const std::size_t n = v.size();
    std::nth_element(v.begin(), v.begin() + std::ptrdiff_t(n / 2), v.end());
    const double hi = v[n / 2];
    if (n % 2 == 1) return hi;
    const double lo = *std::max_element(v.begin(), v.begin() + std::ptrdiff_t(n / 2));
    return 0.5 * (lo + hi);
}

}  // namespace

KeypointChain refine_chain(const std::vector<CanvasPair>& zone_pairs, const ScalarField& source_gray,
                           const ScalarField& target_gray, double brightness_tol) {
    if (zone_pairs.size() < 2) throw Error(ErrorCode::ChainTooShort, "fewer than two pairs in the zone");

    std::vector<double> src_i(zone_pairs.size());
    std::vector<double> tgt_i(zone_pairs.size());
    for (std::size_t i = 0; i < zone_pairs.size(); ++i) {
        src_i[i] = gray_at(source_gray, zone_pairs[i].canvas_src);
        tgt_i[i] = gray_at(target_gray, zone_pairs[i].canvas_tgt);
    }
    const auto left_of = [&](std::size_t a, std::size_t b) {
        const Point2 pa = zone_pairs[a].canvas_src;
        const Point2 pb = zone_pairs[b].canvas_src;
        if (pa.x != pb.x) return pa.x < pb.x;
        if (pa.y != pb.y) return pa.y < pb.y;
        return a < b;
    };

    // Filter against the median of the current set, walk, and repeat on the
    // walk's output until nothing more drops out.
    std::vector<std::size_t> candidates(zone_pairs.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) candidates[i] = i;
    std::vector<std::size_t> walk;
    for (;;) {
        std::vector<double> levels;
        for (std::size_t i : candidates) levels.push_back(src_i[i]);
        const double set_median = median(levels);
        std::vector<std::size_t> kept;
        for (std::size_t i : candidates) {
            if (std::abs(src_i[i] - tgt_i[i]) <= brightness_tol && std::abs(src_i[i] - set_median) <= brightness_tol) {
                kept.push_back(i);
            }
        }
        if (kept.size() < 2) throw Error(ErrorCode::ChainTooShort, "fewer than two pairs pass the brightness filter");

        // Anchor: the surviving pair nearest the left edge of the zone.
        walk.clear();
        std::vector<bool> used(zone_pairs.size(), false);
        std::size_t current = *std::min_element(kept.begin(), kept.end(), left_of);
        for (;;) {
            used[current] = true;
            walk.push_back(current);
            const Point2 here = zone_pairs[current].canvas_src;
            std::size_t next = zone_pairs.size();
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t i : kept) {
                if (used[i]) continue;
                const Point2 p = zone_pairs[i].canvas_src;
                if (!(p.x > here.x)) continue;
                const double d = norm(p - here);
                if (d < best || (d == best && next < zone_pairs.size() && left_of(i, next))) {
                    best = d;
                    next = i;
                }
            }
            if (next == zone_pairs.size()) break;
            current = next;
        }
        if (walk.size() == candidates.size()) break;
        candidates = walk;
        std::sort(candidates.begin(), candidates.end());
    }

    KeypointChain chain;
    for (std::size_t i : walk) {
        chain.src_points.push_back(zone_pairs[i].canvas_src);
        chain.tgt_points.push_back(zone_pairs[i].canvas_tgt);
        chain.intensities.push_back(src_i[i]);
        chain.pair_index.push_back(i);
    }
    if (chain.size() < 2) throw Error(ErrorCode::ChainTooShort, "keypoint chain has a single element");
    return chain;
}

std::vector<Point2> stitching_line(const KeypointChain& chain) { return chain.src_points; }

std::vector<Point2> zone_midline(double x0, double x1, double height) {
    const double mid = 0.5 * (x0 + x1);
    return {{mid, 0.0}, {mid, height}};
}

KeypointChain chain_from_pairs(const std::vector<CanvasPair>& pairs) {
    KeypointChain chain;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        chain.src_points.push_back(pairs[i].canvas_src);
        chain.tgt_points.push_back(pairs[i].canvas_tgt);
        chain.intensities.push_back(0.0);
        chain.pair_index.push_back(i);
    }
    return chain;
}

std::vector<CanvasPair> chain_pairs(const KeypointChain& chain) {
    std::vector<CanvasPair> out;
    for (std::size_t i = 0; i < chain.size(); ++i) out.push_back({chain.src_points[i], chain.tgt_points[i], i});
    return out;
}

}  // namespace seamstitch
