#include "seamstitch/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "seamstitch/error.hpp"

namespace seamstitch {

namespace {

constexpr int kRadius = 5;
constexpr double kSigma = 1.5;
constexpr double kC1 = (0.01 * 255.0) * (0.01 * 255.0);
constexpr double kC2 = (0.03 * 255.0) * (0.03 * 255.0);

void check_dims(const Image& a, const Image& b, const BinaryMask& mask) {
    if (a.width != b.width || a.height != b.height || a.width != mask.width() || a.height != mask.height()) {
        throw Error(ErrorCode::DimensionMismatch, "images and mask differ in size");
    }
    if (a.channels == 0 || b.channels == 0) throw Error(ErrorCode::DimensionMismatch, "image has no channels");
}

std::uint32_t color_channels(const Image& img) { return img.channels >= 3 ? 3 : 1; }

std::uint8_t value(const Image& img, std::uint32_t x, std::uint32_t y, std::uint32_t c) {
    return img.at(x, y, img.channels >= 3 ? c : 0);
}

std::array<double, 2 * kRadius + 1> window_taps() {
    std::array<double, 2 * kRadius + 1> w{};
    double sum = 0.0;
    for (int i = -kRadius; i <= kRadius; ++i) {
        w[i + kRadius] = std::exp(-double(i * i) / (2.0 * kSigma * kSigma));
        sum += w[i + kRadius];
    }
    for (double& v : w) v /= sum;
    return w;
}

}  // namespace

double psnr_overlap(const Image& a, const Image& b, const BinaryMask& mask) {
    check_dims(a, b, mask);
    const std::uint32_t nc = std::max(color_channels(a), color_channels(b));
    double sse = 0.0;
    std::uint64_t n = 0;
    for (std::uint32_t y = 0; y < a.height; ++y) {
        for (std::uint32_t x = 0; x < a.width; ++x) {
            if (!mask.at(x, y)) continue;
            ++n;
            for (std::uint32_t c = 0; c < nc; ++c) {
                const double d = double(value(a, x, y, c)) - double(value(b, x, y, c));
                sse += d * d;
            }
        }
    }
    if (n == 0) throw Error(ErrorCode::EmptyMask, "PSNR mask is empty");
    const double mse = sse / (double(n) * nc);
    if (mse == 0.0) return kInfinitePsnr;
    return 10.0 * std::log10(255.0 * 255.0 / mse);
}

double ssim_overlap(const Image& a, const Image& b, const BinaryMask& mask) {
    check_dims(a, b, mask);
    const std::uint32_t w = a.width;
    const std::uint32_t h = a.height;
    const int span = 2 * kRadius + 1;

    // Summed-area table of the mask to test full-window containment.
    std::vector<std::uint32_t> sat(std::size_t(w + 1) * (h + 1), 0);
    for (std::uint32_t y = 0; y < h; ++y) {
        std::uint32_t row = 0;
        for (std::uint32_t x = 0; x < w; ++x) {
            row += mask.at(x, y) ? 1 : 0;
            sat[std::size_t(y + 1) * (w + 1) + x + 1] = sat[std::size_t(y) * (w + 1) + x + 1] + row;
        }
    }
    const auto full = [&](std::uint32_t cx, std::uint32_t cy) {
        const std::size_t x0 = cx - kRadius, y0 = cy - kRadius, x1 = cx + kRadius + 1, y1 = cy + kRadius + 1;
        const std::uint32_t s = sat[y1 * (w + 1) + x1] - sat[y0 * (w + 1) + x1] - sat[y1 * (w + 1) + x0] +
                                sat[y0 * (w + 1) + x0];
        return s == std::uint32_t(span * span);
    };

    const auto taps = window_taps();
    const std::uint32_t nc = std::max(color_channels(a), color_channels(b));
    double total = 0.0;
    std::uint64_t centers = 0;
    if (w >= std::uint32_t(span) && h >= std::uint32_t(span)) {
        for (std::uint32_t cy = kRadius; cy + kRadius < h; ++cy) {
            for (std::uint32_t cx = kRadius; cx + kRadius < w; ++cx) {
                if (!full(cx, cy)) continue;
                ++centers;
                double acc = 0.0;
                for (std::uint32_t c = 0; c < nc; ++c) {
                    double ma = 0, mb = 0, saa = 0, sbb = 0, sab = 0;
                    for (int dy = -kRadius; dy <= kRadius; ++dy) {
                        for (int dx = -kRadius; dx <= kRadius; ++dx) {
                            const double g = taps[dy + kRadius] * taps[dx + kRadius];
                            const double va = value(a, cx + dx, cy + dy, c);
                            const double vb = value(b, cx + dx, cy + dy, c);
                            ma += g * va;
                            mb += g * vb;
                            saa += g * va * va;
                            sbb += g * vb * vb;
                            sab += g * va * vb;
                        }
                    }
                    const double var_a = saa - ma * ma;
                    const double var_b = sbb - mb * mb;
                    const double cov = sab - ma * mb;
                    acc += ((2.0 * ma * mb + kC1) * (2.0 * cov + kC2)) /
                           ((ma * ma + mb * mb + kC1) * (var_a + var_b + kC2));
                }
                total += acc / nc;
            }
        }
    }
    if (centers == 0) throw Error(ErrorCode::MaskTooSmall, "no 11x11 window fits inside the mask");
    return total / double(centers);
}

OverlapReport overlap_report(const Image& a, const Image& b, const BinaryMask& mask) {
    OverlapReport r;
    r.overlap_pixels = mask.count();
    r.psnr_db = psnr_overlap(a, b, mask);
    r.ssim = ssim_overlap(a, b, mask);
    return r;
}

}  // namespace seamstitch
