#include "seamstitch/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "seamstitch/error.hpp"

namespace seamstitch {

namespace {

std::uint64_t splitmix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double lattice_value(std::uint64_t seed, std::int64_t ix, std::int64_t iy) {
    const std::uint64_t h = splitmix(seed ^ splitmix(std::uint64_t(ix) * 0x632be59bd9b4e019ULL + std::uint64_t(iy)));
    return double(h >> 11) * 0x1.0p-53;
}

double fade(double t) { return t * t * t * (t * (t * 6.0 - 15.0) + 10.0); }

// Smoothly interpolated lattice noise in [0, 1).
double value_noise(std::uint64_t seed, double x, double y) {
    const double fx = std::floor(x);
    const double fy = std::floor(y);
    const auto ix = static_cast<std::int64_t>(fx);
    const auto iy = static_cast<std::int64_t>(fy);
    const double tx = fade(x - fx);
    const double ty = fade(y - fy);
    const double v00 = lattice_value(seed, ix, iy);
    const double v10 = lattice_value(seed, ix + 1, iy);
    const double v01 = lattice_value(seed, ix, iy + 1);
    const double v11 = lattice_value(seed, ix + 1, iy + 1);
    const double a = v00 + (v10 - v00) * tx;
    const double b = v01 + (v11 - v01) * tx;
    return a + (b - a) * ty;
}

struct Primitive {
    bool disc = false;
    double cx = 0, cy = 0, rx = 0, ry = 0;
    std::array<double, 3> color{};
};

constexpr int kPrimitives = 700;
constexpr double kSpan = 1200.0;  // primitives are scattered over [-100, 1100)^2 of base space
constexpr double kEdge = 5.0;     // soft edge width

std::vector<Primitive> make_primitives(std::uint64_t seed) {
    std::mt19937_64 rng(splitmix(seed + 17));
    std::uniform_real_distribution<double> pos(-100.0, kSpan - 100.0);
    std::uniform_real_distribution<double> size(4.0, 22.0);
    std::uniform_real_distribution<double> col(20.0, 235.0);
    std::bernoulli_distribution shape(0.3);
    std::vector<Primitive> out(kPrimitives);
    for (Primitive& p : out) {
        p.disc = shape(rng);
        p.cx = pos(rng);
        p.cy = pos(rng);
        p.rx = size(rng);
        p.ry = p.disc ? p.rx : size(rng);
        for (double& c : p.color) c = col(rng);
    }
    return out;
}

const std::vector<Primitive>& primitives_for(std::uint64_t seed) {
    thread_local std::uint64_t cached_seed = ~std::uint64_t{0};
    thread_local std::vector<Primitive> cached;
    if (cached_seed != seed || cached.empty()) {
        cached = make_primitives(seed);
        cached_seed = seed;
    }
    return cached;
}

// Coverage in [0, 1] with a smooth edge of width kEdge.
double coverage(const Primitive& p, double x, double y) {
    double inside;
    if (p.disc) {
        inside = p.rx - std::hypot(x - p.cx, y - p.cy);
    } else {
        inside = std::min(p.rx - std::abs(x - p.cx), p.ry - std::abs(y - p.cy));
    }
    const double t = std::clamp(inside / kEdge + 0.5, 0.0, 1.0);
    return t * t * (3.0 - 2.0 * t);
}

}  // namespace

std::array<double, 3> texture_at(std::uint64_t seed, double x, double y) {
    std::array<double, 3> rgb{};
    for (std::size_t c = 0; c < 3; ++c) {
        const std::uint64_t s = splitmix(seed * 3 + c);
        double v = 0.0, amp = 0.5, norm = 0.0;
        for (double period : {64.0, 32.0, 16.0, 8.0}) {
            v += amp * value_noise(s + std::uint64_t(period), x / period, y / period);
            norm += amp;
            amp *= 0.6;
        }
        rgb[c] = 30.0 + 195.0 * (v / norm);
    }
    for (const Primitive& p : primitives_for(seed)) {
        if (std::abs(x - p.cx) > p.rx + kEdge || std::abs(y - p.cy) > p.ry + kEdge) continue;
        const double a = coverage(p, x, y);
        if (a <= 0.0) continue;
        for (std::size_t c = 0; c < 3; ++c) rgb[c] = (1.0 - a) * rgb[c] + a * p.color[c];
    }
    return rgb;
}

void SceneSpec::validate() const {
    if (base_dims.width == 0 || base_dims.height == 0 || view_dims.width == 0 || view_dims.height == 0) {
        throw Error(ErrorCode::InvalidSpec, "scene dimensions must be positive");
    }
    if (view_dims.width > base_dims.width || view_dims.height > base_dims.height) {
        throw Error(ErrorCode::InvalidSpec, "view larger than base");
    }
    if (!(std::abs(affine.linear_det()) > 1e-12)) throw Error(ErrorCode::InvalidSpec, "scene motion is not invertible");
    for (double v : affine.data()) {
        if (!std::isfinite(v)) throw Error(ErrorCode::InvalidSpec, "scene motion is not finite");
    }
    if (!(noise_sigma >= 0.0) || match_step == 0) throw Error(ErrorCode::InvalidSpec, "bad noise or match step");
    for (const ParallaxLayer& l : parallax_layers) {
        const Rect& r = l.region;
        if (!std::isfinite(l.depth_shift) || !(r.x0 >= 0.0 && r.y0 >= 0.0 && r.x1 <= base_dims.width &&
                                              r.y1 <= base_dims.height && r.x0 < r.x1 && r.y0 < r.y1)) {
            throw Error(ErrorCode::InvalidSpec, "parallax region outside the base");
        }
    }
}

Point2 crop_offset(const SceneSpec& spec) {
    return {double((spec.base_dims.width - spec.view_dims.width) / 2),
            double((spec.base_dims.height - spec.view_dims.height) / 2)};
}

int layer_at(const SceneSpec& spec, Point2 base_point) {
    for (std::size_t k = spec.parallax_layers.size(); k-- > 0;) {
        if (spec.parallax_layers[k].region.contains(base_point)) return static_cast<int>(k);
    }
    return -1;
}

namespace {

// Base position and layer visible at source point p_s.
std::pair<Point2, int> visible_in_source(const SceneSpec& spec, const AffineTransform& m_inv, Point2 c, Point2 p_s) {
    for (std::size_t k = spec.parallax_layers.size(); k-- > 0;) {
        const ParallaxLayer& l = spec.parallax_layers[k];
        const Point2 b = apply_affine(m_inv, {p_s.x - l.depth_shift, p_s.y}) + c;
        if (l.region.contains(b)) return {b, static_cast<int>(k)};
    }
    return {apply_affine(m_inv, p_s) + c, -1};
}

std::uint8_t to_byte(double v) { return static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0)); }

}  // namespace

SyntheticPair generate_pair(const SceneSpec& spec) {
    spec.validate();
    const AffineTransform m_inv = invert_affine(spec.affine);
    const Point2 c = crop_offset(spec);
    const std::uint32_t w = spec.view_dims.width;
    const std::uint32_t h = spec.view_dims.height;

    std::mt19937_64 noise_rng(splitmix(spec.texture_seed ^ 0x5eedULL));
    std::normal_distribution<double> noise(0.0, spec.noise_sigma > 0.0 ? spec.noise_sigma : 1.0);
    const auto jitter = [&] { return spec.noise_sigma > 0.0 ? noise(noise_rng) : 0.0; };

    SyntheticPair out;
    out.target = Image(w, h, 3);
    out.source = Image(w, h, 3);
    for (std::uint32_t y = 0; y < h; ++y) {
        for (std::uint32_t x = 0; x < w; ++x) {
            const auto rgb = texture_at(spec.texture_seed, x + 0.5 + c.x, y + 0.5 + c.y);
            for (std::uint32_t k = 0; k < 3; ++k) out.target.at(x, y, k) = to_byte(rgb[k] + jitter());
        }
    }
    for (std::uint32_t y = 0; y < h; ++y) {
        for (std::uint32_t x = 0; x < w; ++x) {
            const Point2 b = visible_in_source(spec, m_inv, c, {x + 0.5, y + 0.5}).first;
            const auto rgb = texture_at(spec.texture_seed, b.x, b.y);
            for (std::uint32_t k = 0; k < 3; ++k) out.source.at(x, y, k) = to_byte(rgb[k] + jitter());
        }
    }

    out.ground_truth.source_dims = spec.view_dims;
    out.ground_truth.target_dims = spec.view_dims;
    const std::uint32_t step = spec.match_step;
    for (std::uint32_t y = step / 2; y < h; y += step) {
        for (std::uint32_t x = step / 2; x < w; x += step) {
            const Point2 p_t{x + 0.5, y + 0.5};
            const int layer = layer_at(spec, p_t + c);
            const double shift = layer < 0 ? 0.0 : spec.parallax_layers[std::size_t(layer)].depth_shift;
            const Point2 p_s = apply_affine(spec.affine, p_t) + Point2{shift, 0.0};
            if (!(p_s.x >= 0.0 && p_s.x < w && p_s.y >= 0.0 && p_s.y < h)) continue;
            if (visible_in_source(spec, m_inv, c, p_s).second != layer) continue;
            out.ground_truth.matches.push_back({p_s.x, p_s.y, p_t.x, p_t.y, 1.0});
        }
    }
    return out;
}

}  // namespace seamstitch
