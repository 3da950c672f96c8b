#pragma once

#include <cstdint>
#include <vector>

#include "seamstitch/geometry.hpp"
#include "seamstitch/match.hpp"

namespace seamstitch {

struct WarpConfig {
    std::uint32_t grid_x = 8;
    std::uint32_t grid_y = 8;
    /// Ridge strengths are lambda * max(1, n_support).
    double lambda1 = 1e-3;
    double lambda2 = 1e-1;
    /// sigma_j = alpha * diag(c_j) for the confidence weights.
    double alpha = 0.5;
    double beta = 4.0;
    double kappa_min = 0.05;
    double kappa_max = 1.0;
    double omega_cond = 1e-3;
    double omega_det = 10.0;
    double omega_delta = 0.1;
    double tau_det = 0.2;
    std::uint32_t eval_grid = 5;
    double cond_max = 20.0;
    double rmse_max = 5.0;
    double det_min = 0.2;
    double delta_max = 24.0;

    /// Throws ConfigError when an invariant is violated.
    void validate() const;
};

/// One overlap cell in target space. The mask covers the pixel window
/// starting at `mask_origin`, not the whole target frame.
struct GridCell {
    std::uint32_t col = 0;
    std::uint32_t row = 0;
    BinaryMask mask;
    std::uint32_t mask_origin_x = 0;
    std::uint32_t mask_origin_y = 0;
    Point2 centroid;
    Rect bbox;
    double diag = 0.0;
};

struct OverlapGrid {
    Polygon overlap_polygon;  // target space
    BinaryMask overlap_mask;  // target frame
    Rect grid_bounds;         // bbox the grid tiles
    std::uint32_t grid_x = 0;
    std::uint32_t grid_y = 0;
    std::vector<GridCell> cells;  // surviving cells, row-major order
};

struct Diagnostics {
    double rmse = 0.0;
    double det = 0.0;
    double cond = 1.0;
    double delta_mean = 0.0;
    double composite_score = 0.0;
};

struct LocalFit {
    AffineTransform transform;
    double conf = 0.0;
    Diagnostics diag_report;
    double chosen_lambda = 0.0;
    bool refit_evaluated = false;
    /// Composite score of every candidate evaluated (lambda1 first).
    std::vector<double> candidate_scores;
    std::size_t support_count = 0;
};

/// Projected source quad clipped to the target frame, rasterized, and tiled by
/// a grid_x x grid_y grid over its bounding box. Throws NoOverlap.
OverlapGrid build_overlap_grid(const AffineTransform& a_glob, Dims source_dims, Dims target_dims,
                               const WarpConfig& cfg);

/// Matches whose target point lies in the cell or one of its 8 neighbours.
std::vector<Match> cell_support(const OverlapGrid& grid, const GridCell& cell, const std::vector<Match>& inliers);

/// argmin_T sum |T p_s - p_t|^2 + lambda |T - A_glob|_F^2 over the six affine
/// parameters. Returns a_glob exactly when `support` is empty.
AffineTransform fit_local_affine(const std::vector<Match>& support, const AffineTransform& a_glob, double lambda);

/// Spatial weight-mass confidence, clamped to [kappa_min, kappa_max].
double confidence_score(const GridCell& cell, const std::vector<Match>& support, const WarpConfig& cfg);

/// RMSE, det, cond, mean displacement from a_glob and the composite
/// instability score (lower is more stable).
Diagnostics diagnose_transform(const AffineTransform& t, const AffineTransform& a_glob,
                               const std::vector<Match>& support, const GridCell& cell, const WarpConfig& cfg);

/// Fits with lambda1; when a stability threshold trips, refits with lambda2
/// and keeps whichever candidate scores lower.
LocalFit select_cell_transform(const GridCell& cell, const std::vector<Match>& support,
                               const AffineTransform& a_glob, const WarpConfig& cfg);

/// select_cell_transform over every cell, in cell order.
std::vector<LocalFit> fit_all_cells(const OverlapGrid& grid, const std::vector<Match>& inliers,
                                    const AffineTransform& a_glob, const WarpConfig& cfg);

}  // namespace seamstitch
