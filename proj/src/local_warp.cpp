#include "seamstitch/local_warp.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "seamstitch/error.hpp"

namespace seamstitch {

void WarpConfig::validate() const {
    const bool ok = grid_x > 0 && grid_y > 0 && lambda1 > 0 && lambda2 > 0 && lambda1 < lambda2 && alpha > 0 &&
                    beta > 0 && kappa_min > 0 && kappa_max > 0 && kappa_min < kappa_max && omega_cond > 0 &&
                    omega_det > 0 && omega_delta > 0 && tau_det > 0 && eval_grid > 0 && cond_max > 0 &&
                    rmse_max > 0 && det_min > 0 && delta_max > 0;
    if (!ok) throw Error(ErrorCode::ConfigError, "warp config violates its invariants");
}

namespace {

// Cell edge k of n over [lo, hi]; the last edge is exactly `hi`.
double cell_edge(double lo, double hi, std::uint32_t k, std::uint32_t n) {
    if (k == n) return hi;
    return lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n);
}

// First pixel index whose center x + 0.5 is >= v.
std::int64_t first_center_at_or_after(double v) { return static_cast<std::int64_t>(std::ceil(v - 0.5)); }

}  // namespace

OverlapGrid build_overlap_grid(const AffineTransform& a_glob, Dims source_dims, Dims target_dims,
                               const WarpConfig& cfg) {
    cfg.validate();
    if (!(std::abs(a_glob.linear_det()) > 1e-12)) {
        throw Error(ErrorCode::SingularTransform, "global affine is not invertible");
    }
    const double sw = source_dims.width;
    const double sh = source_dims.height;
    Polygon quad{{apply_affine(a_glob, {0, 0}), apply_affine(a_glob, {sw, 0}), apply_affine(a_glob, {sw, sh}),
                  apply_affine(a_glob, {0, sh})}};
    const Rect target_rect{0, 0, double(target_dims.width), double(target_dims.height)};

    OverlapGrid grid;
    grid.overlap_polygon = clip_polygon(quad, target_rect);
    if (grid.overlap_polygon.empty()) throw Error(ErrorCode::NoOverlap, "projected source does not overlap the target");
    grid.overlap_mask = rasterize_polygon_mask(grid.overlap_polygon, target_dims.width, target_dims.height);
    if (!grid.overlap_mask.any()) throw Error(ErrorCode::NoOverlap, "overlap covers no pixel center");

    grid.grid_bounds = grid.overlap_polygon.bounds();
    grid.grid_x = cfg.grid_x;
    grid.grid_y = cfg.grid_y;
    const Rect& b = grid.grid_bounds;
    const auto tw = static_cast<std::int64_t>(target_dims.width);
    const auto th = static_cast<std::int64_t>(target_dims.height);

    for (std::uint32_t r = 0; r < cfg.grid_y; ++r) {
        for (std::uint32_t c = 0; c < cfg.grid_x; ++c) {
            const Rect cell_rect{cell_edge(b.x0, b.x1, c, cfg.grid_x), cell_edge(b.y0, b.y1, r, cfg.grid_y),
                                 cell_edge(b.x0, b.x1, c + 1, cfg.grid_x), cell_edge(b.y0, b.y1, r + 1, cfg.grid_y)};
            const std::int64_t px0 = std::clamp<std::int64_t>(first_center_at_or_after(cell_rect.x0), 0, tw);
            const std::int64_t px1 = std::clamp<std::int64_t>(first_center_at_or_after(cell_rect.x1), 0, tw);
            const std::int64_t py0 = std::clamp<std::int64_t>(first_center_at_or_after(cell_rect.y0), 0, th);
            const std::int64_t py1 = std::clamp<std::int64_t>(first_center_at_or_after(cell_rect.y1), 0, th);
            if (px1 <= px0 || py1 <= py0) continue;

            GridCell cell;
            cell.col = c;
            cell.row = r;
            cell.mask_origin_x = static_cast<std::uint32_t>(px0);
            cell.mask_origin_y = static_cast<std::uint32_t>(py0);
            cell.mask = BinaryMask(static_cast<std::uint32_t>(px1 - px0), static_cast<std::uint32_t>(py1 - py0));
            bool any = false;
            for (std::int64_t y = py0; y < py1; ++y) {
                for (std::int64_t x = px0; x < px1; ++x) {
                    if (grid.overlap_mask.at(std::uint32_t(x), std::uint32_t(y))) {
                        cell.mask.set(std::uint32_t(x - px0), std::uint32_t(y - py0), true);
                        any = true;
                    }
                }
            }
            if (!any) continue;
            const Point2 local = mask_centroid(cell.mask);
            cell.centroid = {local.x + cell.mask_origin_x, local.y + cell.mask_origin_y};
            cell.bbox = cell_rect;
            cell.diag = std::hypot(cell_rect.width(), cell_rect.height());
            grid.cells.push_back(std::move(cell));
        }
    }
    return grid;
}

std::vector<Match> cell_support(const OverlapGrid& grid, const GridCell& cell, const std::vector<Match>& inliers) {
    const Rect& b = grid.grid_bounds;
    const double cw = b.width() / grid.grid_x;
    const double ch = b.height() / grid.grid_y;
    std::vector<Match> out;
    for (const Match& m : inliers) {
        const double fc = std::floor((m.xt - b.x0) / cw);
        const double fr = std::floor((m.yt - b.y0) / ch);
        // The far edge of the bounds belongs to the last cell.
        const double col = m.xt == b.x1 ? grid.grid_x - 1.0 : fc;
        const double row = m.yt == b.y1 ? grid.grid_y - 1.0 : fr;
        if (col < 0 || row < 0 || col >= grid.grid_x || row >= grid.grid_y) continue;
        if (std::abs(col - cell.col) <= 1.0 && std::abs(row - cell.row) <= 1.0) out.push_back(m);
    }
    return out;
}

AffineTransform fit_local_affine(const std::vector<Match>& support, const AffineTransform& a_glob, double lambda) {
    if (!(lambda > 0.0)) throw Error(ErrorCode::ConfigError, "ridge strength must be positive");
    if (support.empty()) return a_glob;

    // Solve for the correction D = T - A_glob on the augmented system
    // [X; sqrt(lambda) I] d = [r; 0], with r = p_t - A_glob p_s.
    const auto n = static_cast<Eigen::Index>(support.size());
    Eigen::MatrixXd design = Eigen::MatrixXd::Zero(n + 3, 3);
    Eigen::VectorXd rx = Eigen::VectorXd::Zero(n + 3);
    Eigen::VectorXd ry = Eigen::VectorXd::Zero(n + 3);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Match& m = support[static_cast<std::size_t>(i)];
        const Point2 base = apply_affine(a_glob, {m.xs, m.ys});
        design(i, 0) = m.xs;
        design(i, 1) = m.ys;
        design(i, 2) = 1.0;
        rx[i] = m.xt - base.x;
        ry[i] = m.yt - base.y;
    }
    const double s = std::sqrt(lambda);
    for (Eigen::Index k = 0; k < 3; ++k) design(n + k, k) = s;

    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(design);
    const Eigen::Vector3d dx = qr.solve(rx);
    const Eigen::Vector3d dy = qr.solve(ry);
    if (!dx.allFinite() || !dy.allFinite()) {
        throw Error(ErrorCode::NumericalFailure, "regularized normal equations are singular");
    }
    return {a_glob(0, 0) + dx[0], a_glob(0, 1) + dx[1], a_glob(0, 2) + dx[2],
            a_glob(1, 0) + dy[0], a_glob(1, 1) + dy[1], a_glob(1, 2) + dy[2]};
}

double confidence_score(const GridCell& cell, const std::vector<Match>& support, const WarpConfig& cfg) {
    if (support.empty()) return cfg.kappa_min;
    const double sigma = cfg.alpha * cell.diag;
    double sum = 0.0;
    double maxw = 0.0;
    for (const Match& m : support) {
        const double dx = m.xt - cell.centroid.x;
        const double dy = m.yt - cell.centroid.y;
        const double w = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
        sum += w;
        maxw = std::max(maxw, w);
    }
    if (!(maxw > 0.0)) return cfg.kappa_min;
    return std::max(cfg.kappa_min, std::min(cfg.kappa_max, sum / (cfg.beta * maxw)));
}

Diagnostics diagnose_transform(const AffineTransform& t, const AffineTransform& a_glob,
                               const std::vector<Match>& support, const GridCell& cell, const WarpConfig& cfg) {
    Diagnostics d;
    if (!support.empty()) {
        double ss = 0.0;
        for (const Match& m : support) {
            const Point2 p = apply_affine(t, {m.xs, m.ys});
            ss += (p.x - m.xt) * (p.x - m.xt) + (p.y - m.yt) * (p.y - m.yt);
        }
        d.rmse = std::sqrt(ss / static_cast<double>(support.size()));
    }
    d.det = t.linear_det();
    d.cond = t.linear_cond();

    const std::uint32_t ng = cfg.eval_grid;
    const Rect& b = cell.bbox;
    double total = 0.0;
    for (std::uint32_t j = 0; j < ng; ++j) {
        const double fy = ng > 1 ? double(j) / double(ng - 1) : 0.5;
        for (std::uint32_t i = 0; i < ng; ++i) {
            const double fx = ng > 1 ? double(i) / double(ng - 1) : 0.5;
            const Point2 p{b.x0 + fx * b.width(), b.y0 + fy * b.height()};
            total += norm(apply_affine(t, p) - apply_affine(a_glob, p));
        }
    }
    d.delta_mean = total / double(ng * ng);
    d.composite_score = d.rmse + cfg.omega_cond * d.cond + cfg.omega_det * std::max(0.0, cfg.tau_det - std::abs(d.det)) +
                        cfg.omega_delta * d.delta_mean;
    return d;
}

namespace {

bool unstable(const Diagnostics& d, const WarpConfig& cfg) {
    return d.cond > cfg.cond_max || std::abs(d.det) < cfg.det_min || d.rmse > cfg.rmse_max ||
           d.delta_mean > cfg.delta_max;
}

}  // namespace

LocalFit select_cell_transform(const GridCell& cell, const std::vector<Match>& support,
                               const AffineTransform& a_glob, const WarpConfig& cfg) {
    const double scale = std::max<double>(1.0, static_cast<double>(support.size()));
    const double l1 = cfg.lambda1 * scale;
    const double l2 = cfg.lambda2 * scale;

    LocalFit fit;
    fit.support_count = support.size();
    fit.conf = confidence_score(cell, support, cfg);
    fit.transform = fit_local_affine(support, a_glob, l1);
    fit.diag_report = diagnose_transform(fit.transform, a_glob, support, cell, cfg);
    fit.chosen_lambda = l1;
    fit.candidate_scores.push_back(fit.diag_report.composite_score);

    if (unstable(fit.diag_report, cfg)) {
        fit.refit_evaluated = true;
        const AffineTransform t2 = fit_local_affine(support, a_glob, l2);
        const Diagnostics d2 = diagnose_transform(t2, a_glob, support, cell, cfg);
        fit.candidate_scores.push_back(d2.composite_score);
        if (d2.composite_score < fit.diag_report.composite_score) {
            fit.transform = t2;
            fit.diag_report = d2;
            fit.chosen_lambda = l2;
        }
    }
    return fit;
}

std::vector<LocalFit> fit_all_cells(const OverlapGrid& grid, const std::vector<Match>& inliers,
                                    const AffineTransform& a_glob, const WarpConfig& cfg) {
    std::vector<LocalFit> fits;
    fits.reserve(grid.cells.size());
    for (const GridCell& cell : grid.cells) {
        fits.push_back(select_cell_transform(cell, cell_support(grid, cell, inliers), a_glob, cfg));
    }
    return fits;
}

}  // namespace seamstitch
