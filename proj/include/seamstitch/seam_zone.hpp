#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "seamstitch/render.hpp"

namespace seamstitch {

struct ZoneConfig {
    /// Class width R = canvas_width / range_divisor.
    std::uint32_t range_divisor = 20;
    /// Maximum jump between neighbouring class means inside one cluster.
    double v = 2.0;
    double lambda = 0.5;
    double epsilon = 1e-6;
    /// Keep only pairs with x_S > x_T before classification.
    bool require_source_right = false;

    void validate() const;
};

struct DisparityClass {
    std::size_t index = 0;  // position along x, 0-based
    double x_lo = 0.0;
    double x_hi = 0.0;
    std::vector<std::size_t> members;  // indices into the pair list
    double mean_disparity = 0.0;
};

/// Half-open range [begin, end) into the class list.
struct ClusterRange {
    std::size_t begin = 0;
    std::size_t end = 0;

    [[nodiscard]] std::size_t size() const { return end - begin; }
    friend bool operator==(const ClusterRange&, const ClusterRange&) = default;
};

struct DisparityCluster {
    ClusterRange classes;
    double mu_c = 0.0;
    double sigma = 0.0;
    std::size_t cardinality = 0;
    double delta_mu = 0.0;
    double score = 0.0;
};

struct ZoneSelection {
    DisparityCluster best;
    std::vector<DisparityCluster> scored;  // every cluster, in input order
    double mu_g = 0.0;
    double zone_x0 = 0.0;
    double zone_x1 = 0.0;
};

/// Buckets pairs by canvas_src.x into classes of width canvas_width / divisor
/// and averages x_S - x_T per class. Empty classes are omitted. Throws NoPairs.
std::vector<DisparityClass> classify_disparities(const std::vector<CanvasPair>& pairs, std::uint32_t canvas_width,
                                                 const ZoneConfig& cfg);

/// Threshold-based clustering of consecutive class means; clusters with a
/// single class are dropped.
std::vector<ClusterRange> cluster_disparities(const std::vector<double>& means, double v);

/// w = C / ((sigma + lambda * |mu_c - mu_g|) + epsilon).
double cluster_score(std::size_t cardinality, double sigma, double delta_mu, double lambda, double epsilon);

/// Scores every cluster and picks the best (ties: larger C, then lower index).
/// Throws NoClusters when `clusters` is empty.
ZoneSelection score_and_select(const std::vector<ClusterRange>& clusters, const std::vector<DisparityClass>& classes,
                               const ZoneConfig& cfg);

/// Used when no cluster survives: the most populated class widened by one
/// class width on each side, clipped to the canvas.
ZoneSelection fallback_zone(const std::vector<DisparityClass>& classes, std::uint32_t canvas_width,
                            const ZoneConfig& cfg);

}  // namespace seamstitch
