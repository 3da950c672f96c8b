#include "seamstitch/seam_zone.hpp"

#include <algorithm>
#include <cmath>

#include "seamstitch/error.hpp"

namespace seamstitch {

void ZoneConfig::validate() const {
    if (range_divisor == 0 || !(v >= 0.0) || !(lambda > 0.0) || !(epsilon > 0.0)) {
        throw Error(ErrorCode::ConfigError, "zone config violates its invariants");
    }
}

std::vector<DisparityClass> classify_disparities(const std::vector<CanvasPair>& pairs, std::uint32_t canvas_width,
                                                 const ZoneConfig& cfg) {
    cfg.validate();
    if (pairs.empty()) throw Error(ErrorCode::NoPairs, "no correspondences to classify");
    const double range = double(canvas_width) / double(cfg.range_divisor);

    std::vector<DisparityClass> all(cfg.range_divisor);
    std::vector<double> sums(cfg.range_divisor, 0.0);
    for (std::size_t k = 0; k < all.size(); ++k) {
        all[k].index = k;
        all[k].x_lo = double(k) * range;
        all[k].x_hi = k + 1 == all.size() ? double(canvas_width) : double(k + 1) * range;
    }
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const CanvasPair& p = pairs[i];
        const double x = p.canvas_src.x;
        if (!(x >= 0.0 && x < double(canvas_width))) continue;
        if (cfg.require_source_right && !(p.canvas_src.x > p.canvas_tgt.x)) continue;
        auto k = static_cast<std::size_t>(std::floor(x / range));
        k = std::min(k, all.size() - 1);
        // Guard the floating-point edge between neighbouring classes.
        if (x < all[k].x_lo && k > 0) --k;
        if (x >= all[k].x_hi && k + 1 < all.size()) ++k;
        all[k].members.push_back(i);
        sums[k] += p.canvas_src.x - p.canvas_tgt.x;
    }

    std::vector<DisparityClass> out;
    for (std::size_t k = 0; k < all.size(); ++k) {
        if (all[k].members.empty()) continue;
        all[k].mean_disparity = sums[k] / double(all[k].members.size());
        out.push_back(std::move(all[k]));
    }
    if (out.empty()) throw Error(ErrorCode::NoPairs, "no correspondence falls inside the canvas");
    return out;
}

std::vector<ClusterRange> cluster_disparities(const std::vector<double>& means, double v) {
    std::vector<ClusterRange> clusters;
    if (means.empty()) return clusters;
    ClusterRange current{0, 1};
    for (std::size_t i = 1; i < means.size(); ++i) {
        if (std::abs(means[i] - means[i - 1]) <= v) {
            current.end = i + 1;
        } else {
            if (current.size() >= 2) clusters.push_back(current);
            current = {i, i + 1};
        }
    }
    if (current.size() >= 2) clusters.push_back(current);
    return clusters;
}

double cluster_score(std::size_t cardinality, double sigma, double delta_mu, double lambda, double epsilon) {
    return double(cardinality) / ((sigma + lambda * delta_mu) + epsilon);
}

ZoneSelection score_and_select(const std::vector<ClusterRange>& clusters, const std::vector<DisparityClass>& classes,
                               const ZoneConfig& cfg) {
    if (clusters.empty()) throw Error(ErrorCode::NoClusters, "no disparity cluster with two or more classes");
    ZoneSelection sel;
    for (const DisparityClass& c : classes) sel.mu_g += c.mean_disparity;
    sel.mu_g /= double(classes.size());

    std::size_t best = 0;
    for (std::size_t k = 0; k < clusters.size(); ++k) {
        const ClusterRange r = clusters[k];
        DisparityCluster dc;
        dc.classes = r;
        for (std::size_t i = r.begin; i < r.end; ++i) {
            dc.mu_c += classes[i].mean_disparity;
            dc.cardinality += classes[i].members.size();
        }
        dc.mu_c /= double(r.size());
        double var = 0.0;
        for (std::size_t i = r.begin; i < r.end; ++i) {
            const double d = classes[i].mean_disparity - dc.mu_c;
            var += d * d;
        }
        dc.sigma = std::sqrt(var / double(r.size()));
        dc.delta_mu = std::abs(dc.mu_c - sel.mu_g);
        dc.score = cluster_score(dc.cardinality, dc.sigma, dc.delta_mu, cfg.lambda, cfg.epsilon);
        sel.scored.push_back(dc);

        const DisparityCluster& cur = sel.scored[best];
        if (k > 0 && (dc.score > cur.score || (dc.score == cur.score && dc.cardinality > cur.cardinality))) best = k;
    }
    sel.best = sel.scored[best];
    sel.zone_x0 = classes[sel.best.classes.begin].x_lo;
    sel.zone_x1 = classes[sel.best.classes.end - 1].x_hi;
    return sel;
}

ZoneSelection fallback_zone(const std::vector<DisparityClass>& classes, std::uint32_t canvas_width,
                            const ZoneConfig& cfg) {
    if (classes.empty()) throw Error(ErrorCode::NoPairs, "no classes to fall back on");
    std::size_t top = 0;
    for (std::size_t k = 1; k < classes.size(); ++k) {
        if (classes[k].members.size() > classes[top].members.size()) top = k;
    }
    const double range = double(canvas_width) / double(cfg.range_divisor);
    ZoneSelection sel;
    for (const DisparityClass& c : classes) sel.mu_g += c.mean_disparity;
    sel.mu_g /= double(classes.size());
    sel.best.classes = {top, top + 1};
    sel.best.mu_c = classes[top].mean_disparity;
    sel.best.cardinality = classes[top].members.size();
    sel.best.delta_mu = std::abs(sel.best.mu_c - sel.mu_g);
    sel.zone_x0 = std::max(0.0, classes[top].x_lo - range);
    sel.zone_x1 = std::min(double(canvas_width), classes[top].x_hi + range);
    return sel;
}

}  // namespace seamstitch
