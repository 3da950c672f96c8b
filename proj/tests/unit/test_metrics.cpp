#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "seamstitch/error.hpp"
#include "seamstitch/metrics.hpp"
#include "seamstitch/synth.hpp"

using namespace seamstitch;

namespace {

Image textured(std::uint32_t w, std::uint32_t h, std::uint64_t seed) {
    Image img(w, h, 3);
    for (std::uint32_t y = 0; y < h; ++y) {
        for (std::uint32_t x = 0; x < w; ++x) {
            const auto rgb = texture_at(seed, x + 0.5, y + 0.5);
            for (std::uint32_t c = 0; c < 3; ++c) img.at(x, y, c) = static_cast<std::uint8_t>(std::lround(rgb[c]));
        }
    }
    return img;
}

Image noise(std::uint32_t w, std::uint32_t h, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Image img(w, h, 3);
    for (auto& v : img.data) v = static_cast<std::uint8_t>(rng() & 0xff);
    return img;
}

Image shifted(const Image& img, int delta) {
    Image out = img;
    for (auto& v : out.data) v = static_cast<std::uint8_t>(std::clamp(int(v) + delta, 0, 255));
    return out;
}

}  // namespace

TEST(Psnr, ClosedForms) {
    const BinaryMask all(40, 30, true);
    EXPECT_NEAR(psnr_overlap(Image(40, 30, 3, 100), Image(40, 30, 3, 110), all), 28.1308, 1e-4);
    EXPECT_NEAR(psnr_overlap(Image(40, 30, 3, 100), Image(40, 30, 3, 110), all), 20.0 * std::log10(25.5), 1e-12);
    EXPECT_EQ(psnr_overlap(Image(40, 30, 3, 0), Image(40, 30, 3, 255), all), 0.0);
    const Image t = textured(40, 30, 3);
    EXPECT_EQ(psnr_overlap(t, t, all), kInfinitePsnr);
    EXPECT_TRUE(std::isinf(psnr_overlap(t, t, all)));
}

TEST(Psnr, OnlyMaskedPixelsCount) {
    Image a(20, 20, 3, 50), b(20, 20, 3, 50);
    BinaryMask m(20, 20);
    for (std::uint32_t y = 0; y < 20; ++y) {
        for (std::uint32_t x = 0; x < 10; ++x) m.set(x, y, true);
        for (std::uint32_t x = 10; x < 20; ++x) {
            for (std::uint32_t c = 0; c < 3; ++c) b.at(x, y, c) = 250;
        }
    }
    EXPECT_EQ(psnr_overlap(a, b, m), kInfinitePsnr);
    try {
        psnr_overlap(a, b, BinaryMask(20, 20));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::EmptyMask);
    }
    try {
        psnr_overlap(a, Image(21, 20, 3), m);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
    }
}

TEST(Psnr, SymmetricAndMonotone) {
    const BinaryMask all(48, 36, true);
    const Image t = textured(48, 36, 8);
    const Image n = noise(48, 36, 8);
    EXPECT_EQ(psnr_overlap(t, n, all), psnr_overlap(n, t, all));
    const Image mid(48, 36, 3, 128);
    double prev = kInfinitePsnr;
    for (int e = 1; e <= 120; e += 7) {
        const double p = psnr_overlap(mid, shifted(mid, e), all);
        EXPECT_LT(p, prev);
        prev = p;
    }
}

TEST(Ssim, IdenticalIsOne) {
    const Image t = textured(64, 48, 4);
    EXPECT_EQ(ssim_overlap(t, t, BinaryMask(64, 48, true)), 1.0);
}

TEST(Ssim, InvertedTextureIsLow) {
    const Image t = noise(64, 64, 5);
    Image inv = t;
    for (auto& v : inv.data) v = static_cast<std::uint8_t>(255 - v);
    const BinaryMask all(64, 64, true);
    const double want = oracle::reference_ssim(t, inv, all);
    const double got = ssim_overlap(t, inv, all);
    EXPECT_LT(want, 0.2);
    EXPECT_LT(got, 0.2);
    EXPECT_NEAR(got, want, 1e-9);
}

TEST(Ssim, ConstantOffsetLuminanceOnly) {
    const double c1 = std::pow(0.01 * 255.0, 2);
    const double want = (2 * 100.0 * 110.0 + c1) / (100.0 * 100.0 + 110.0 * 110.0 + c1);
    EXPECT_NEAR(ssim_overlap(Image(30, 30, 3, 100), Image(30, 30, 3, 110), BinaryMask(30, 30, true)), want, 1e-12);
}

TEST(Ssim, AgreesWithReferenceOnMaskedRegions) {
    std::mt19937_64 rng(14);
    for (int t = 0; t < 6; ++t) {
        const Image a = textured(60, 44, 20 + t);
        Image b = a;
        std::normal_distribution<double> n(0.0, 4.0 + 6.0 * t);
        for (auto& v : b.data) v = static_cast<std::uint8_t>(std::clamp(v + n(rng), 0.0, 255.0));
        BinaryMask m(60, 44);
        const std::uint32_t x0 = rng() % 15, y0 = rng() % 10, x1 = 45 + rng() % 15, y1 = 30 + rng() % 14;
        for (std::uint32_t y = y0; y < y1; ++y) {
            for (std::uint32_t x = x0; x < x1; ++x) m.set(x, y, true);
        }
        m.set(x0 + 12, y0 + 12, false);  // a hole removes the windows around it
        const double got = ssim_overlap(a, b, m);
        EXPECT_NEAR(got, oracle::reference_ssim(a, b, m), 1e-9);
        EXPECT_NEAR(ssim_overlap(b, a, m), got, 1e-12);
        EXPECT_LT(got, 1.0);
        EXPECT_GE(got, -1.0);
    }
}

TEST(Ssim, MaskTooSmall) {
    BinaryMask m(30, 30);
    for (std::uint32_t y = 0; y < 10; ++y) {
        for (std::uint32_t x = 0; x < 30; ++x) m.set(x, y, true);
    }
    try {
        ssim_overlap(Image(30, 30, 3), Image(30, 30, 3), m);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::MaskTooSmall);
    }
}

TEST(OverlapReport, CountsPixels) {
    const Image t = textured(40, 40, 1);
    BinaryMask m(40, 40);
    for (std::uint32_t y = 5; y < 35; ++y) {
        for (std::uint32_t x = 2; x < 30; ++x) m.set(x, y, true);
    }
    const OverlapReport r = overlap_report(t, shifted(t, 3), m);
    EXPECT_EQ(r.overlap_pixels, 30u * 28u);
    EXPECT_GT(r.ssim, 0.9);
    EXPECT_LT(r.psnr_db, 40.0);
}
