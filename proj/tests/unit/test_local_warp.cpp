#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "seamstitch/error.hpp"
#include "seamstitch/local_warp.hpp"

using namespace seamstitch;

namespace {

GridCell square_cell(Point2 centroid, double side) {
    GridCell c;
    c.centroid = centroid;
    c.bbox = {centroid.x - side / 2, centroid.y - side / 2, centroid.x + side / 2, centroid.y + side / 2};
    c.diag = std::hypot(side, side);
    return c;
}

std::vector<Match> consistent_matches(const AffineTransform& a, int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 300.0);
    std::vector<Match> out;
    for (int i = 0; i < n; ++i) {
        const Point2 p{u(rng), u(rng)};
        const Point2 q = apply_affine(a, p);
        out.push_back({p.x, p.y, q.x, q.y, 1.0});
    }
    return out;
}

}  // namespace

TEST(OverlapGrid, IdentityFullFrame) {
    const OverlapGrid g = build_overlap_grid(AffineTransform{}, {640, 480}, {640, 480}, {});
    EXPECT_EQ(g.overlap_mask.count(), 640u * 480u);
    ASSERT_EQ(g.cells.size(), 64u);
    for (const GridCell& c : g.cells) {
        EXPECT_DOUBLE_EQ(c.centroid.x, 0.5 * (c.bbox.x0 + c.bbox.x1));
        EXPECT_DOUBLE_EQ(c.centroid.y, 0.5 * (c.bbox.y0 + c.bbox.y1));
        EXPECT_DOUBLE_EQ(c.diag, std::hypot(80.0, 60.0));
    }
}

TEST(OverlapGrid, HalfTranslationKeepsRightHalf) {
    const OverlapGrid g = build_overlap_grid(AffineTransform::translation(320, 0), {640, 480}, {640, 480}, {});
    EXPECT_EQ(g.overlap_mask.count(), 320u * 480u);
    // The grid tiles the overlap's bounding box [320, 640) x [0, 480), so all 64 cells survive.
    EXPECT_EQ(g.cells.size(), 64u);
    for (const GridCell& c : g.cells) {
        EXPECT_GE(c.bbox.x0, 320.0);
        EXPECT_LE(c.bbox.x1, 640.0);
        EXPECT_GE(c.centroid.x, 320.0);
    }
}

TEST(OverlapGrid, DisjointFramesHaveNoOverlap) {
    try {
        build_overlap_grid(AffineTransform::translation(1280, 0), {640, 480}, {640, 480}, {});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NoOverlap);
    }
}

TEST(OverlapGrid, DroppedCellsHoldNoOverlapPixels) {
    const AffineTransform a = AffineTransform::translation(200, 40) * AffineTransform::rotation(0.5, {320, 240});
    const OverlapGrid g = build_overlap_grid(a, {640, 480}, {640, 480}, {});
    EXPECT_LT(g.cells.size(), 64u);
    std::vector<bool> kept(64, false);
    for (const GridCell& c : g.cells) {
        kept[c.row * 8 + c.col] = true;
        EXPECT_TRUE(c.mask.any());
        EXPECT_TRUE(c.bbox.contains(c.centroid));
        EXPECT_GT(c.diag, 0.0);
    }
    const Rect& b = g.grid_bounds;
    for (std::uint32_t r = 0; r < 8; ++r) {
        for (std::uint32_t col = 0; col < 8; ++col) {
            if (kept[r * 8 + col]) continue;
            const double x0 = b.x0 + b.width() * col / 8, x1 = b.x0 + b.width() * (col + 1) / 8;
            const double y0 = b.y0 + b.height() * r / 8, y1 = b.y0 + b.height() * (r + 1) / 8;
            for (std::uint32_t y = 0; y < 480; ++y) {
                for (std::uint32_t x = 0; x < 640; ++x) {
                    const double cx = x + 0.5, cy = y + 0.5;
                    if (cx >= x0 && cx < x1 && cy >= y0 && cy < y1) ASSERT_FALSE(g.overlap_mask.at(x, y));
                }
            }
        }
    }
}

TEST(LocalFit, ConsistentMatchesReproduceGlobal) {
    const AffineTransform a(1.1, 0.05, 30, -0.02, 0.95, -12);
    const auto m = consistent_matches(a, 25, 3);
    for (double lambda : {1e-6, 1e-3, 1.0, 1e3}) {
        EXPECT_LT(fit_local_affine(m, a, lambda).frobenius_distance(a), 1e-9) << lambda;
    }
}

TEST(LocalFit, ZeroMatchesReturnGlobalExactly) {
    const AffineTransform a(1.1, 0.05, 30, -0.02, 0.95, -12);
    EXPECT_EQ(fit_local_affine({}, a, 1e-3), a);
}

TEST(LocalFit, HugeLambdaPinsToGlobal) {
    const AffineTransform a = AffineTransform::translation(4, 2);
    auto m = consistent_matches(AffineTransform(1.3, 0.2, -20, 0.1, 0.8, 15), 30, 8);
    EXPECT_LT(fit_local_affine(m, a, 1e12).frobenius_distance(a), 1e-6);
}

TEST(LocalFit, StrongerRidgeStaysCloser) {
    std::mt19937_64 rng(12);
    std::normal_distribution<double> jitter(0.0, 2.0);
    const AffineTransform a(1.0, 0.0, 5.0, 0.0, 1.0, -5.0);
    for (int trial = 0; trial < 50; ++trial) {
        auto m = consistent_matches(AffineTransform(1.02, 0.01, 3, -0.01, 0.99, -4), 12, 100 + trial);
        for (Match& x : m) {
            x.xt += jitter(rng);
            x.yt += jitter(rng);
        }
        const double d1 = fit_local_affine(m, a, 1e-3 * 12).frobenius_distance(a);
        const double d2 = fit_local_affine(m, a, 1e-1 * 12).frobenius_distance(a);
        EXPECT_LE(d2, d1 + 1e-12);
    }
}

TEST(Confidence, WeightMassExamples) {
    WarpConfig cfg;
    cfg.beta = 2.0;
    cfg.kappa_min = 0.05;
    cfg.kappa_max = 1.0;
    const GridCell cell = square_cell({50, 50}, 40);
    const Match at_centroid{10, 10, 50, 50, 1};
    // Expected values computed with the longhand oracle.
    const double one = oracle::weight_mass_confidence({{50, 50}}, {50, 50}, cfg.alpha * cell.diag, 2.0, 0.05, 1.0);
    EXPECT_EQ(one, 0.5);
    EXPECT_NEAR(confidence_score(cell, {at_centroid}, cfg), 0.5, 0.5 * 1e-9);
    const std::vector<Match> eight(8, at_centroid);
    EXPECT_NEAR(confidence_score(cell, eight, cfg), 1.0, 1e-9);
    EXPECT_EQ(confidence_score(cell, {}, cfg), 0.05);
}

TEST(Confidence, StaysInsideClampRange) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-200.0, 300.0);
    const WarpConfig cfg;
    const GridCell cell = square_cell({50, 50}, 40);
    for (int t = 0; t < 200; ++t) {
        std::vector<Match> m(std::size_t(t % 17));
        std::vector<Point2> pts;
        for (Match& x : m) {
            x.xt = u(rng);
            x.yt = u(rng);
            pts.push_back({x.xt, x.yt});
        }
        const double c = confidence_score(cell, m, cfg);
        EXPECT_GE(c, cfg.kappa_min);
        EXPECT_LE(c, cfg.kappa_max);
        const double want = oracle::weight_mass_confidence(pts, cell.centroid, cfg.alpha * cell.diag, cfg.beta,
                                                           cfg.kappa_min, cfg.kappa_max);
        if (std::isfinite(want)) EXPECT_NEAR(c, want, 1e-12);
    }
}

TEST(Diagnostics, IdentityScoreIsConditionTermOnly) {
    const WarpConfig cfg;
    const GridCell cell = square_cell({50, 50}, 40);
    const auto m = consistent_matches(AffineTransform{}, 10, 1);
    const Diagnostics d = diagnose_transform(AffineTransform{}, AffineTransform{}, m, cell, cfg);
    EXPECT_EQ(d.rmse, 0.0);
    EXPECT_EQ(d.det, 1.0);
    EXPECT_EQ(d.cond, 1.0);
    EXPECT_EQ(d.delta_mean, 0.0);
    const double want = oracle::instability_score(0, 1, 1, 0, cfg.omega_cond, cfg.omega_det, cfg.tau_det, cfg.omega_delta);
    EXPECT_EQ(want, 1e-3);
    EXPECT_NEAR(d.composite_score, 1e-3, 1e-3 * 1e-9);
}

TEST(Diagnostics, SmallDeterminantPenalty) {
    const WarpConfig cfg;
    const GridCell cell = square_cell({50, 50}, 40);
    const AffineTransform t = AffineTransform::scaling(0.1, 0.1);
    const Diagnostics d = diagnose_transform(t, t, {}, cell, cfg);
    EXPECT_NEAR(d.det, 0.01, 1e-15);
    EXPECT_EQ(d.cond, 1.0);
    // omega_det * (0.2 - 0.01) = 1.9, plus the condition term.
    const double want = oracle::instability_score(0, 1, 0.01, 0, cfg.omega_cond, cfg.omega_det, cfg.tau_det, cfg.omega_delta);
    EXPECT_NEAR(want, 1.901, 1e-12);
    EXPECT_NEAR(d.composite_score, 1.901, 1.901 * 1e-9);
    EXPECT_NEAR(d.composite_score - cfg.omega_cond * d.cond, 1.9, 1.9 * 1e-9);
}

TEST(Diagnostics, EqualTransformsHaveZeroDelta) {
    WarpConfig cfg;
    const GridCell cell = square_cell({500, 300}, 64);
    const AffineTransform a(0.9, 0.3, -40, -0.2, 1.2, 70);
    for (std::uint32_t n : {1u, 2u, 5u, 9u}) {
        cfg.eval_grid = n;
        EXPECT_EQ(diagnose_transform(a, a, {}, cell, cfg).delta_mean, 0.0);
    }
}

TEST(Diagnostics, DeltaMeanOfTranslationOffset) {
    const WarpConfig cfg;
    const GridCell cell = square_cell({50, 50}, 40);
    const Diagnostics d =
        diagnose_transform(AffineTransform::translation(3, 4), AffineTransform{}, {}, cell, cfg);
    EXPECT_NEAR(d.delta_mean, 5.0, 1e-12);
}

TEST(SelectCell, StableFitKeepsFirstLambda) {
    const WarpConfig cfg;
    const GridCell cell = square_cell({150, 150}, 80);
    const AffineTransform a = AffineTransform::translation(10, -5);
    const auto m = consistent_matches(a, 20, 2);
    const LocalFit f = select_cell_transform(cell, m, a, cfg);
    EXPECT_FALSE(f.refit_evaluated);
    // Ridge strength scales with the support count.
    EXPECT_EQ(f.chosen_lambda, cfg.lambda1 * 20);
    EXPECT_LT(f.transform.frobenius_distance(a), 1e-9);
}

TEST(SelectCell, ZeroMatches) {
    const WarpConfig cfg;
    const GridCell cell = square_cell({150, 150}, 80);
    const AffineTransform a = AffineTransform::translation(10, -5);
    const LocalFit f = select_cell_transform(cell, {}, a, cfg);
    EXPECT_EQ(f.transform, a);
    EXPECT_EQ(f.chosen_lambda, cfg.lambda1);
    EXPECT_EQ(f.conf, cfg.kappa_min);
}

TEST(SelectCell, CollinearSupportTriggersRefit) {
    const WarpConfig cfg;
    const GridCell cell = square_cell({150, 150}, 80);
    std::vector<Match> m;
    for (int i = 0; i < 10; ++i) m.push_back({110.0 + 8.0 * i, 150.0, 150.0, 150.0, 1.0});
    const LocalFit f = select_cell_transform(cell, m, AffineTransform{}, cfg);
    EXPECT_TRUE(f.refit_evaluated);
    ASSERT_EQ(f.candidate_scores.size(), 2u);
    EXPECT_EQ(f.diag_report.composite_score, std::min(f.candidate_scores[0], f.candidate_scores[1]));
}

TEST(SelectCell, ChosenScoreIsMinimumOnRandomSupport) {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(100.0, 200.0);
    std::normal_distribution<double> big(0.0, 30.0);
    const WarpConfig cfg;
    const GridCell cell = square_cell({150, 150}, 80);
    for (int t = 0; t < 100; ++t) {
        std::vector<Match> m;
        for (int i = 0; i < 3 + t % 7; ++i) {
            const double x = u(rng), y = u(rng);
            m.push_back({x, y, x + big(rng), y + big(rng), 1.0});
        }
        const LocalFit f = select_cell_transform(cell, m, AffineTransform{}, cfg);
        double best = f.candidate_scores.front();
        for (double s : f.candidate_scores) best = std::min(best, s);
        EXPECT_EQ(f.diag_report.composite_score, best);
        EXPECT_GE(f.conf, cfg.kappa_min);
        EXPECT_LE(f.conf, cfg.kappa_max);
    }
}

TEST(CellSupport, EightNeighbourhoodOnTargetPoint) {
    const OverlapGrid g = build_overlap_grid(AffineTransform{}, {80, 80}, {80, 80}, {});
    // Cells are 10 x 10; cell (3, 3) supports target points inside [20, 50)^2.
    const GridCell* mid = nullptr;
    for (const GridCell& c : g.cells) {
        if (c.col == 3 && c.row == 3) mid = &c;
    }
    ASSERT_NE(mid, nullptr);
    std::vector<Match> m{{0, 0, 20.0, 20.0, 1}, {0, 0, 49.9, 49.9, 1}, {0, 0, 50.0, 30.0, 1}, {0, 0, 19.9, 30.0, 1},
                         {70, 70, 35.0, 35.0, 1}};
    const auto s = cell_support(g, *mid, m);
    ASSERT_EQ(s.size(), 3u);
    EXPECT_EQ(s[0].xt, 20.0);
    EXPECT_EQ(s[1].xt, 49.9);
    EXPECT_EQ(s[2].xs, 70.0);
}
