#pragma once

#include <cstdint>
#include <limits>

#include "seamstitch/geometry.hpp"
#include "seamstitch/image.hpp"

namespace seamstitch {

struct OverlapReport {
    double psnr_db = 0.0;  // +inf when the masked pixels agree exactly
    double ssim = 0.0;
    std::uint64_t overlap_pixels = 0;
};

inline constexpr double kInfinitePsnr = std::numeric_limits<double>::infinity();

/// 10 log10(255^2 / MSE) over masked pixels, MSE averaged over the color
/// channels (alpha ignored). Throws EmptyMask or DimensionMismatch.
double psnr_overlap(const Image& a, const Image& b, const BinaryMask& mask);

/// Mean SSIM (11x11 Gaussian window, sigma 1.5, K1 0.01, K2 0.03, L 255)
/// over window centers whose whole window lies in the mask, averaged over
/// the color channels. Throws MaskTooSmall when no such center exists.
double ssim_overlap(const Image& a, const Image& b, const BinaryMask& mask);

OverlapReport overlap_report(const Image& a, const Image& b, const BinaryMask& mask);

}  // namespace seamstitch
