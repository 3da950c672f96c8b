#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "seamstitch/imaging.hpp"

using namespace seamstitch;

TEST(Blur, SeparableMatchesDirectConvolution) {
    std::mt19937_64 rng(64);
    std::uniform_real_distribution<float> u(0.0f, 1.0f);
    for (double sigma : {0.7, 1.5, 3.0}) {
        ScalarField f(64, 64);
        for (float& v : f.values) v = u(rng);
        const ScalarField a = gaussian_blur(f, sigma);
        const ScalarField b = oracle::direct_gaussian_blur(f, sigma);
        for (std::size_t i = 0; i < a.values.size(); ++i) ASSERT_NEAR(a.values[i], b.values[i], 1e-5);
    }
}

TEST(Blur, KernelIsNormalized) {
    for (double sigma : {0.5, 1.0, 2.5, 25.0}) {
        const auto k = gaussian_kernel(sigma);
        EXPECT_EQ(k.size(), 2 * std::size_t(std::ceil(4 * sigma)) + 1);
        double s = 0.0;
        for (double v : k) s += v;
        EXPECT_NEAR(s, 1.0, 1e-12);
    }
    EXPECT_EQ(gaussian_kernel(0.0), std::vector<double>{1.0});
}

TEST(Bilinear, HalfOffsetAveragesNeighbours) {
    ScalarField f(4, 1);
    f.values = {0.0f, 10.0f, 30.0f, 60.0f};
    EXPECT_DOUBLE_EQ(sample_bilinear(f, 0.5, 0.0), 5.0);
    EXPECT_DOUBLE_EQ(sample_bilinear(f, 2.5, 0.0), 45.0);
    EXPECT_DOUBLE_EQ(sample_bilinear(f, -3.0, 0.0), 0.0);
    EXPECT_DOUBLE_EQ(sample_bilinear(f, 9.0, 0.0), 60.0);
}

TEST(Bicubic, InterpolatesNodesAndLinearRamps) {
    ScalarField lat(5, 4);
    for (std::uint32_t j = 0; j < 4; ++j) {
        for (std::uint32_t i = 0; i < 5; ++i) lat.at(i, j) = float(2.0 * i - 3.0 * j);
    }
    const ScalarField up = bicubic_resize(lat, 41, 31);
    for (std::uint32_t j = 0; j < 4; ++j) {
        for (std::uint32_t i = 0; i < 5; ++i) EXPECT_NEAR(up.at(i * 10, j * 10), lat.at(i, j), 1e-5);
    }
    // Catmull-Rom reproduces linear functions away from the clamped border.
    EXPECT_NEAR(up.at(15, 15), 2.0 * 1.5 - 3.0 * 1.5, 1e-5);
}

TEST(DistanceTransform, MatchesBruteForce) {
    std::mt19937_64 rng(17);
    for (double density : {0.01, 0.1, 0.5}) {
        std::bernoulli_distribution bit(density);
        BinaryMask seeds(31, 19);
        for (std::uint32_t y = 0; y < 19; ++y) {
            for (std::uint32_t x = 0; x < 31; ++x) seeds.set(x, y, bit(rng));
        }
        seeds.set(3, 4, true);
        const auto a = squared_distance_transform(seeds);
        const auto b = oracle::brute_force_sq_distance(seeds);
        for (std::size_t i = 0; i < a.size(); ++i) ASSERT_EQ(a[i], b[i]);
    }
    const auto none = squared_distance_transform(BinaryMask(4, 4));
    for (double v : none) EXPECT_TRUE(std::isinf(v));
}
