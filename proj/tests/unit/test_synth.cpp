#include <gtest/gtest.h>

#include <cmath>

#include "seamstitch/error.hpp"
#include "seamstitch/metrics.hpp"
#include "seamstitch/render.hpp"
#include "seamstitch/seam_zone.hpp"
#include "seamstitch/synth.hpp"

using namespace seamstitch;

namespace {

std::vector<CanvasPair> raw_pairs(const MatchSet& ms) {
    std::vector<CanvasPair> out;
    for (std::size_t i = 0; i < ms.size(); ++i) {
        const Match& m = ms.matches[i];
        out.push_back({{m.xs, m.ys}, {m.xt, m.yt}, i});
    }
    return out;
}

SceneSpec two_layer_scene() {
    SceneSpec s;
    s.affine = AffineTransform::translation(40, 0);
    s.texture_seed = 21;
    s.parallax_layers = {{0.0, {0, 0, 400, 600}}, {15.0, {400, 0, 800, 600}}};
    return s;
}

}  // namespace

TEST(Synth, IdentitySceneHasEqualViews) {
    SceneSpec s;
    s.texture_seed = 2;
    const SyntheticPair p = generate_pair(s);
    EXPECT_EQ(p.source, p.target);
    ASSERT_EQ(p.ground_truth.size(), 40u * 30u);
    for (const Match& m : p.ground_truth.matches) {
        EXPECT_EQ(m.xs, m.xt);
        EXPECT_EQ(m.ys, m.yt);
    }
}

TEST(Synth, TranslationDisparityIsExact) {
    SceneSpec s;
    s.affine = AffineTransform::translation(40, 0);
    s.texture_seed = 3;
    const SyntheticPair p = generate_pair(s);
    ASSERT_GT(p.ground_truth.size(), 800u);
    for (const Match& m : p.ground_truth.matches) {
        EXPECT_EQ(m.xs - m.xt, 40.0);
        EXPECT_EQ(m.ys, m.yt);
    }
    // Source pixel x shows what the target shows at x - 40.
    for (std::uint32_t y = 0; y < 480; y += 37) {
        for (std::uint32_t x = 40; x < 640; x += 23) EXPECT_EQ(p.source.at(x, y, 1), p.target.at(x - 40, y, 1));
    }
}

TEST(Synth, TwoLayerModes) {
    const SyntheticPair p = generate_pair(two_layer_scene());
    ZoneConfig cfg;
    const auto classes = classify_disparities(raw_pairs(p.ground_truth), 640, cfg);
    // Layer columns: static layer at x_s = 48.5 + 16k up to 352.5, the shifted
    // layer from 383.5 to 639.5. Class 11 ([352, 384)) holds one column of each.
    ASSERT_EQ(classes.size(), 19u);
    std::vector<double> means;
    for (std::size_t k = 0; k < classes.size(); ++k) {
        EXPECT_EQ(classes[k].index, k + 1);
        means.push_back(classes[k].mean_disparity);
        const double want = k < 10 ? 40.0 : (k == 10 ? 47.5 : 55.0);
        EXPECT_EQ(classes[k].mean_disparity, want) << k;
    }
    const auto clusters = cluster_disparities(means, 2.0);
    ASSERT_EQ(clusters, (std::vector<ClusterRange>{{0, 10}, {11, 19}}));
    const ZoneSelection sel = score_and_select(clusters, classes, cfg);
    EXPECT_EQ(sel.scored[0].cardinality, 19u * 30u);
    EXPECT_EQ(sel.scored[1].cardinality, 16u * 30u);
    EXPECT_EQ(sel.best.classes, clusters[0]);
    EXPECT_EQ(sel.zone_x0, 32.0);
    EXPECT_EQ(sel.zone_x1, 352.0);
    EXPECT_NEAR(sel.mu_g, 887.5 / 19.0, 1e-12);
}

TEST(Synth, Deterministic) {
    SceneSpec s = two_layer_scene();
    s.noise_sigma = 2.0;
    s.affine = AffineTransform::rotation(0.05, {320, 240}) * s.affine;
    const SyntheticPair a = generate_pair(s);
    const SyntheticPair b = generate_pair(s);
    EXPECT_EQ(a.source, b.source);
    EXPECT_EQ(a.target, b.target);
    EXPECT_EQ(a.ground_truth, b.ground_truth);
    s.texture_seed += 1;
    EXPECT_NE(generate_pair(s).target, a.target);
}

TEST(Synth, WarpByTrueMotionReproducesTarget) {
    for (const AffineTransform& m :
         {AffineTransform::translation(40.5, 6.25), AffineTransform::translation(60, 8) *
                                                        AffineTransform::rotation(4.0 * M_PI / 180.0, {320, 240})}) {
        SceneSpec s;
        s.affine = m;
        s.texture_seed = 9;
        const SyntheticPair p = generate_pair(s);
        const CanvasFrame f{640, 480, 0, 0};
        const Canvas c{f, warp_source(p.source, invert_affine(m), DisplacementField(640, 480), f),
                       paste_target(p.target, f)};
        const BinaryMask mask = joint_coverage(c);
        EXPECT_GT(mask.count(), 200000u);
        EXPECT_GE(psnr_overlap(c.source_layer, c.target_layer, mask), 50.0);
    }
}

TEST(Synth, InvalidSpecs) {
    const auto expect_invalid = [](const SceneSpec& s) {
        try {
            generate_pair(s);
            ADD_FAILURE();
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::InvalidSpec);
        }
    };
    SceneSpec s;
    s.affine = AffineTransform(1, 2, 0, 2, 4, 0);
    expect_invalid(s);
    s = SceneSpec{};
    s.view_dims = {900, 100};
    expect_invalid(s);
    s = SceneSpec{};
    s.parallax_layers = {{5.0, {700, 0, 900, 10}}};
    expect_invalid(s);
    s = SceneSpec{};
    s.noise_sigma = -1;
    expect_invalid(s);
}
