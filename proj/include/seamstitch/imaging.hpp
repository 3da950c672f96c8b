#pragma once

#include <vector>

#include "seamstitch/geometry.hpp"
#include "seamstitch/image.hpp"

namespace seamstitch {

/// Normalized Gaussian taps, radius ceil(4 sigma). sigma <= 0 gives {1}.
std::vector<double> gaussian_kernel(double sigma);

/// Separable Gaussian blur with clamp-to-edge borders.
ScalarField gaussian_blur(const ScalarField& field, double sigma);

/// Bilinear sample in index space (pixel centers at integers), clamp-to-edge.
double sample_bilinear(const ScalarField& field, double x, double y);

/// Catmull-Rom bicubic resample. Lattice node (i, j) maps onto output pixel
/// (i * (W-1)/(nx-1), j * (H-1)/(ny-1)); borders clamp to edge.
ScalarField bicubic_resize(const ScalarField& lattice, std::uint32_t width, std::uint32_t height);

/// Exact squared Euclidean distance from every pixel center to the nearest
/// pixel whose value in `seeds` is true. No seeds yields +inf everywhere.
std::vector<double> squared_distance_transform(const BinaryMask& seeds);

}  // namespace seamstitch
