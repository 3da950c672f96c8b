#pragma once

#include <cstdint>
#include <vector>

#include "seamstitch/canvas.hpp"
#include "seamstitch/image.hpp"
#include "seamstitch/local_warp.hpp"

namespace seamstitch {

struct FieldConfig {
    std::uint32_t nx = 64;
    std::uint32_t ny = 64;
    /// sigma_f = alpha_f * mean diagonal of the surviving cells.
    double alpha_f = 0.75;
    double d_max = 48.0;
    /// Lattice smoothing, in lattice units.
    double sigma_l = 1.0;
    /// Ramp bandwidth b = rho * target diagonal.
    double rho = 0.02;
    double sigma_d = 25.0;
    double gamma_p = 1.5;
    double gamma_min = 0.15;
    double sigma_g = 3.0;
    /// Blur the gated field with sigma_g (off: plain G * dp).
    bool blur_guarded = true;

    void validate() const;
};

/// Node (i, j) sits on canvas pixel (i * (W-1)/(nx-1), j * (H-1)/(ny-1)).
/// Displacements are in source pixels.
struct DeformationLattice {
    std::uint32_t nx = 0;
    std::uint32_t ny = 0;
    ScalarField dx;
    ScalarField dy;
    CanvasFrame frame;

    /// Continuous canvas position of node (i, j).
    [[nodiscard]] Point2 node_position(std::uint32_t i, std::uint32_t j) const;
};

/// Normalized blending weights w_j(p_t) for every cell. Empty when the
/// normalizer vanishes.
std::vector<double> ffd_blend_weights(Point2 p_t, const std::vector<LocalFit>& fits,
                                      const std::vector<GridCell>& cells, double sigma_f);

/// sigma_f for the given cells and config.
double ffd_sigma(const std::vector<GridCell>& cells, const FieldConfig& cfg);

/// Confidence-weighted blend of the per-cell inverse-mapping displacements
/// on an ny x nx lattice over the canvas.
DeformationLattice blend_displacement_lattice(const std::vector<LocalFit>& fits, const std::vector<GridCell>& cells,
                                              const AffineTransform& a_glob, const CanvasFrame& frame,
                                              const FieldConfig& cfg);

/// Component-wise clip to +-d_max followed by a sigma_l Gaussian on the lattice.
DeformationLattice clip_and_smooth_lattice(const DeformationLattice& lat, const FieldConfig& cfg);

/// clip_and_smooth_lattice, then bicubic upsampling to the canvas.
/// Throws LatticeTooSmall below 4x4.
DisplacementField regularize_lattice(const DeformationLattice& lat, const FieldConfig& cfg);

/// 6t^5 - 15t^4 + 10t^3 on t clamped to [0, 1].
double smootherstep(double t);

/// Signed Euclidean distance to the mask boundary (positive inside). Pixels
/// beyond the raster count as outside.
ScalarField signed_distance(const BinaryMask& mask);

/// R(u) = S(clamp(d(u) / b, 0, 1)). Throws EmptyOverlap.
ScalarField build_ramp(const BinaryMask& overlap_mask, double bandwidth);

/// Ramp bandwidth rho * diagonal of the target frame.
double ramp_bandwidth(Dims target_dims, const FieldConfig& cfg);

/// Impulses at the pixels containing the points, blurred by sigma_d and
/// normalized by the maximum. No points gives an all-zero field.
ScalarField build_density_map(const std::vector<Point2>& canvas_points, const CanvasFrame& frame,
                              const FieldConfig& cfg);

/// G = S(R)^gamma_p * (gamma_min + (1 - gamma_min) * S(D)).
ScalarField build_gate(const ScalarField& ramp, const ScalarField& density, const FieldConfig& cfg);

/// Multiplies both channels by G, then blurs with sigma_g when enabled.
DisplacementField gate_field(const DisplacementField& disp, const ScalarField& gate, const FieldConfig& cfg);

}  // namespace seamstitch
