#include "seamstitch/ffd_field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "seamstitch/error.hpp"
#include "seamstitch/imaging.hpp"

namespace seamstitch {

void FieldConfig::validate() const {
    const bool ok = nx > 0 && ny > 0 && alpha_f > 0 && d_max > 0 && sigma_l > 0 && rho > 0 && sigma_d > 0 &&
                    gamma_p > 0 && gamma_min > 0 && gamma_min < 1 && sigma_g > 0;
    if (!ok) throw Error(ErrorCode::ConfigError, "field config violates its invariants");
}

Point2 DeformationLattice::node_position(std::uint32_t i, std::uint32_t j) const {
    const double px = nx > 1 ? double(i) * double(frame.width - 1) / double(nx - 1) : 0.0;
    const double py = ny > 1 ? double(j) * double(frame.height - 1) / double(ny - 1) : 0.0;
    return {px + 0.5, py + 0.5};
}

double ffd_sigma(const std::vector<GridCell>& cells, const FieldConfig& cfg) {
    if (cells.empty()) return 0.0;
    double sum = 0.0;
    for (const GridCell& c : cells) sum += c.diag;
    return cfg.alpha_f * sum / static_cast<double>(cells.size());
}

std::vector<double> ffd_blend_weights(Point2 p_t, const std::vector<LocalFit>& fits,
                                      const std::vector<GridCell>& cells, double sigma_f) {
    const std::size_t n = std::min(fits.size(), cells.size());
    std::vector<double> logw(n);
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
        const double dx = p_t.x - cells[j].centroid.x;
        const double dy = p_t.y - cells[j].centroid.y;
        // log(conf_j) - |p_t - c_j|^2 / (2 sigma_f^2); shifted by the max below.
        logw[j] = std::log(fits[j].conf) - (dx * dx + dy * dy) / (2.0 * sigma_f * sigma_f);
        top = std::max(top, logw[j]);
    }
    if (!std::isfinite(top)) return {};
    std::vector<double> w(n);
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        w[j] = std::exp(logw[j] - top);
        sum += w[j];
    }
    if (!(sum > 0.0)) return {};
    for (double& v : w) v /= sum;
    return w;
}

DeformationLattice blend_displacement_lattice(const std::vector<LocalFit>& fits, const std::vector<GridCell>& cells,
                                              const AffineTransform& a_glob, const CanvasFrame& frame,
                                              const FieldConfig& cfg) {
    cfg.validate();
    if (fits.empty() || fits.size() != cells.size()) {
        throw Error(ErrorCode::DimensionMismatch, "need one local fit per grid cell");
    }
    const AffineTransform a_inv = invert_affine(a_glob);
    std::vector<AffineTransform> local_inv;
    local_inv.reserve(fits.size());
    for (const LocalFit& f : fits) local_inv.push_back(invert_affine(f.transform));
    const double sigma_f = ffd_sigma(cells, cfg);

    DeformationLattice lat;
    lat.nx = cfg.nx;
    lat.ny = cfg.ny;
    lat.frame = frame;
    lat.dx = ScalarField(cfg.nx, cfg.ny);
    lat.dy = ScalarField(cfg.nx, cfg.ny);

    for (std::uint32_t j = 0; j < cfg.ny; ++j) {
        for (std::uint32_t i = 0; i < cfg.nx; ++i) {
            const Point2 p_t = frame.to_target(lat.node_position(i, j));
            const std::vector<double> w = ffd_blend_weights(p_t, fits, cells, sigma_f);
            if (w.empty()) continue;
            const Point2 base = apply_affine(a_inv, p_t);
            double dx = 0.0, dy = 0.0;
            for (std::size_t k = 0; k < w.size(); ++k) {
                const Point2 local = apply_affine(local_inv[k], p_t);
                dx += w[k] * (local.x - base.x);
                dy += w[k] * (local.y - base.y);
            }
            lat.dx.at(i, j) = static_cast<float>(dx);
            lat.dy.at(i, j) = static_cast<float>(dy);
        }
    }
    return lat;
}

DeformationLattice clip_and_smooth_lattice(const DeformationLattice& lat, const FieldConfig& cfg) {
    DeformationLattice out = lat;
    const auto dmax = static_cast<float>(cfg.d_max);
    for (float& v : out.dx.values) v = std::clamp(v, -dmax, dmax);
    for (float& v : out.dy.values) v = std::clamp(v, -dmax, dmax);
    out.dx = gaussian_blur(out.dx, cfg.sigma_l);
    out.dy = gaussian_blur(out.dy, cfg.sigma_l);
    return out;
}

DisplacementField regularize_lattice(const DeformationLattice& lat, const FieldConfig& cfg) {
    if (lat.nx < 4 || lat.ny < 4) throw Error(ErrorCode::LatticeTooSmall, "bicubic upsampling needs a 4x4 lattice");
    const DeformationLattice smooth = clip_and_smooth_lattice(lat, cfg);
    DisplacementField field;
    field.dx = bicubic_resize(smooth.dx, lat.frame.width, lat.frame.height);
    field.dy = bicubic_resize(smooth.dy, lat.frame.width, lat.frame.height);
    // Catmull-Rom can overshoot; keep the clip bound.
    const auto dmax = static_cast<float>(cfg.d_max);
    for (float& v : field.dx.values) v = std::clamp(v, -dmax, dmax);
    for (float& v : field.dy.values) v = std::clamp(v, -dmax, dmax);
    return field;
}

double smootherstep(double t) {
    t = std::clamp(t, 0.0, 1.0);
    return t * t * t * (t * (6.0 * t - 15.0) + 10.0);
}

ScalarField signed_distance(const BinaryMask& mask) {
    const std::uint32_t w = mask.width();
    const std::uint32_t h = mask.height();
    // One-pixel border of "outside" so the raster edge is a boundary too.
    BinaryMask outside(w + 2, h + 2, true);
    BinaryMask inside(w + 2, h + 2, false);
    for (std::uint32_t y = 0; y < h; ++y) {
        for (std::uint32_t x = 0; x < w; ++x) {
            if (mask.at(x, y)) {
                outside.set(x + 1, y + 1, false);
                inside.set(x + 1, y + 1, true);
            }
        }
    }
    const std::vector<double> to_outside = squared_distance_transform(outside);
    const std::vector<double> to_inside = squared_distance_transform(inside);
    ScalarField sd(w, h);
    for (std::uint32_t y = 0; y < h; ++y) {
        for (std::uint32_t x = 0; x < w; ++x) {
            const std::size_t k = std::size_t(y + 1) * (w + 2) + (x + 1);
            // Pixel centers sit half a pixel from the boundary between neighbours.
            sd.at(x, y) = mask.at(x, y) ? static_cast<float>(std::sqrt(to_outside[k]) - 0.5)
                                        : static_cast<float>(-(std::sqrt(to_inside[k]) - 0.5));
        }
    }
    return sd;
}

ScalarField build_ramp(const BinaryMask& overlap_mask, double bandwidth) {
    if (!overlap_mask.any()) throw Error(ErrorCode::EmptyOverlap, "overlap mask is empty");
    if (!(bandwidth > 0.0)) throw Error(ErrorCode::ConfigError, "ramp bandwidth must be positive");
    const ScalarField sd = signed_distance(overlap_mask);
    ScalarField ramp(sd.width, sd.height);
    for (std::size_t i = 0; i < sd.values.size(); ++i) {
        ramp.values[i] = static_cast<float>(smootherstep(std::clamp(sd.values[i] / bandwidth, 0.0, 1.0)));
    }
    return ramp;
}

double ramp_bandwidth(Dims target_dims, const FieldConfig& cfg) {
    return cfg.rho * std::hypot(double(target_dims.width), double(target_dims.height));
}

ScalarField build_density_map(const std::vector<Point2>& canvas_points, const CanvasFrame& frame,
                              const FieldConfig& cfg) {
    ScalarField impulses(frame.width, frame.height);
    for (const Point2& p : canvas_points) {
        const double fx = std::floor(p.x);
        const double fy = std::floor(p.y);
        if (fx < 0 || fy < 0 || fx >= frame.width || fy >= frame.height) continue;
        impulses.at(static_cast<std::uint32_t>(fx), static_cast<std::uint32_t>(fy)) += 1.0f;
    }
    ScalarField d = gaussian_blur(impulses, cfg.sigma_d);
    const float top = d.values.empty() ? 0.0f : *std::max_element(d.values.begin(), d.values.end());
    if (!(top > 0.0f)) return ScalarField(frame.width, frame.height);
    for (float& v : d.values) v /= top;
    return d;
}

ScalarField build_gate(const ScalarField& ramp, const ScalarField& density, const FieldConfig& cfg) {
    if (ramp.width != density.width || ramp.height != density.height) {
        throw Error(ErrorCode::DimensionMismatch, "ramp and density differ in size");
    }
    ScalarField gate(ramp.width, ramp.height);
    for (std::size_t i = 0; i < ramp.values.size(); ++i) {
        const double geometric = std::pow(smootherstep(ramp.values[i]), cfg.gamma_p);
        const double modulation = cfg.gamma_min + (1.0 - cfg.gamma_min) * smootherstep(density.values[i]);
        gate.values[i] = static_cast<float>(std::clamp(geometric * modulation, 0.0, 1.0));
    }
    return gate;
}

DisplacementField gate_field(const DisplacementField& disp, const ScalarField& gate, const FieldConfig& cfg) {
    if (disp.width() != gate.width || disp.height() != gate.height) {
        throw Error(ErrorCode::DimensionMismatch, "displacement field and gate differ in size");
    }
    DisplacementField out = disp;
    for (std::size_t i = 0; i < gate.values.size(); ++i) {
        out.dx.values[i] *= gate.values[i];
        out.dy.values[i] *= gate.values[i];
    }
    if (cfg.blur_guarded) {
        out.dx = gaussian_blur(out.dx, cfg.sigma_g);
        out.dy = gaussian_blur(out.dy, cfg.sigma_g);
    }
    return out;
}

}  // namespace seamstitch
