#include "seamstitch/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Dense>

#include "seamstitch/error.hpp"

namespace seamstitch {

double norm(Point2 p) { return std::hypot(p.x, p.y); }

MatchSet MatchSet::select(const std::vector<std::size_t>& indices) const {
    MatchSet out;
    out.source_dims = source_dims;
    out.target_dims = target_dims;
    out.matches.reserve(indices.size());
    for (std::size_t i : indices) out.matches.push_back(matches.at(i));
    return out;
}

// =============================================================================
// AffineTransform
// =============================================================================

AffineTransform::AffineTransform(double a, double b, double c, double d, double e, double f)
    : m_{a, b, c, d, e, f, 0, 0, 1} {}

AffineTransform AffineTransform::translation(double dx, double dy) { return {1, 0, dx, 0, 1, dy}; }

AffineTransform AffineTransform::scaling(double sx, double sy) { return {sx, 0, 0, 0, sy, 0}; }

AffineTransform AffineTransform::rotation(double radians, Point2 center) {
    const double c = std::cos(radians);
    const double s = std::sin(radians);
    // p' = R (p - center) + center
    return {c, -s, center.x - c * center.x + s * center.y, s, c, center.y - s * center.x - c * center.y};
}

double AffineTransform::linear_det() const { return m_[0] * m_[4] - m_[1] * m_[3]; }

double AffineTransform::linear_cond() const {
    // Singular values of a 2x2 in closed form.
    const double a = m_[0], b = m_[1], c = m_[3], d = m_[4];
    const double s1 = a * a + b * b + c * c + d * d;
    const double det = a * d - b * c;
    const double disc = std::sqrt(std::max(0.0, s1 * s1 - 4.0 * det * det));
    const double smax = std::sqrt((s1 + disc) / 2.0);
    const double smin2 = (s1 - disc) / 2.0;
    // smin from det avoids cancellation in (s1 - disc).
    const double smin = smax > 0.0 ? std::abs(det) / smax : std::sqrt(std::max(0.0, smin2));
    if (smin <= 0.0) return std::numeric_limits<double>::infinity();
    return std::max(1.0, smax / smin);
}

double AffineTransform::frobenius_distance(const AffineTransform& other) const {
    double s = 0.0;
    for (int i = 0; i < 6; ++i) {
        const double d = m_[i] - other.m_[i];
        s += d * d;
    }
    return std::sqrt(s);
}

AffineTransform operator*(const AffineTransform& lhs, const AffineTransform& rhs) {
    const auto& l = lhs.m_;
    const auto& r = rhs.m_;
    return {l[0] * r[0] + l[1] * r[3],
            l[0] * r[1] + l[1] * r[4],
            l[0] * r[2] + l[1] * r[5] + l[2],
            l[3] * r[0] + l[4] * r[3],
            l[3] * r[1] + l[4] * r[4],
            l[3] * r[2] + l[4] * r[5] + l[5]};
}

Point2 apply_affine(const AffineTransform& t, Point2 p) {
    const auto& m = t.data();
    const double x = m[0] * p.x + m[1] * p.y + m[2];
    const double y = m[3] * p.x + m[4] * p.y + m[5];
    const double z = m[6] * p.x + m[7] * p.y + m[8];
    if (std::abs(z) < 1e-12) throw Error(ErrorCode::SingularProjection, "projection with z ~ 0");
    return {x / z, y / z};
}

AffineTransform invert_affine(const AffineTransform& t) {
    const double det = t.linear_det();
    if (!(std::abs(det) > 1e-12)) throw Error(ErrorCode::SingularTransform, "affine transform is not invertible");
    const double a = t(0, 0), b = t(0, 1), c = t(0, 2);
    const double d = t(1, 0), e = t(1, 1), f = t(1, 2);
    const double ia = e / det, ib = -b / det, id = -d / det, ie = a / det;
    return {ia, ib, -(ia * c + ib * f), id, ie, -(id * c + ie * f)};
}

// =============================================================================
// Polygons
// =============================================================================

double Polygon::signed_area() const {
    const std::size_t n = vertices.size();
    if (n < 3) return 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Point2& p = vertices[i];
        const Point2& q = vertices[(i + 1) % n];
        s += p.x * q.y - q.x * p.y;
    }
    return 0.5 * s;
}

double Polygon::area() const { return std::abs(signed_area()); }

Rect Polygon::bounds() const {
    if (vertices.empty()) return {};
    Rect r{vertices[0].x, vertices[0].y, vertices[0].x, vertices[0].y};
    for (const Point2& p : vertices) {
        r.x0 = std::min(r.x0, p.x);
        r.y0 = std::min(r.y0, p.y);
        r.x1 = std::max(r.x1, p.x);
        r.y1 = std::max(r.y1, p.y);
    }
    return r;
}

Polygon polygon_from_rect(const Rect& r) {
    return Polygon{{{r.x0, r.y0}, {r.x1, r.y0}, {r.x1, r.y1}, {r.x0, r.y1}}};
}

namespace {

// One Sutherland-Hodgman pass. `inside(p)` is the half-plane test and
// `cross(a, b)` the intersection of segment ab with the clip line.
template <typename Inside, typename Cross>
std::vector<Point2> clip_against(const std::vector<Point2>& in, Inside inside, Cross cross) {
    std::vector<Point2> out;
    const std::size_t n = in.size();
    if (n == 0) return out;
    out.reserve(n + 2);
    for (std::size_t i = 0; i < n; ++i) {
        const Point2& cur = in[i];
        const Point2& prev = in[(i + n - 1) % n];
        const bool cur_in = inside(cur);
        const bool prev_in = inside(prev);
        if (cur_in) {
            if (!prev_in) out.push_back(cross(prev, cur));
            out.push_back(cur);
        } else if (prev_in) {
            out.push_back(cross(prev, cur));
        }
    }
    return out;
}

Point2 cross_vertical(Point2 a, Point2 b, double x) {
    const double t = (x - a.x) / (b.x - a.x);
    return {x, a.y + t * (b.y - a.y)};
}

Point2 cross_horizontal(Point2 a, Point2 b, double y) {
    const double t = (y - a.y) / (b.y - a.y);
    return {a.x + t * (b.x - a.x), y};
}

std::vector<Point2> dedupe(const std::vector<Point2>& pts) {
    std::vector<Point2> out;
    for (const Point2& p : pts) {
        if (!out.empty() && std::abs(out.back().x - p.x) < 1e-12 && std::abs(out.back().y - p.y) < 1e-12) continue;
        out.push_back(p);
    }
    while (out.size() > 1 && std::abs(out.front().x - out.back().x) < 1e-12 &&
           std::abs(out.front().y - out.back().y) < 1e-12) {
        out.pop_back();
    }
    return out;
}

}  // namespace

Polygon clip_polygon(const Polygon& subject, const Rect& clip_rect) {
    if (subject.vertices.size() < 3) return {};
    std::vector<Point2> pts = subject.vertices;
    if (subject.signed_area() < 0.0) std::reverse(pts.begin(), pts.end());

    const Rect& r = clip_rect;
    pts = clip_against(pts, [&](Point2 p) { return p.x >= r.x0; },
                       [&](Point2 a, Point2 b) { return cross_vertical(a, b, r.x0); });
    pts = clip_against(pts, [&](Point2 p) { return p.x <= r.x1; },
                       [&](Point2 a, Point2 b) { return cross_vertical(a, b, r.x1); });
    pts = clip_against(pts, [&](Point2 p) { return p.y >= r.y0; },
                       [&](Point2 a, Point2 b) { return cross_horizontal(a, b, r.y0); });
    pts = clip_against(pts, [&](Point2 p) { return p.y <= r.y1; },
                       [&](Point2 a, Point2 b) { return cross_horizontal(a, b, r.y1); });

    Polygon out{dedupe(pts)};
    if (out.vertices.size() < 3 || out.area() <= 1e-12) return {};
    return out;
}

// =============================================================================
// Masks
// =============================================================================

BinaryMask::BinaryMask(std::uint32_t width, std::uint32_t height, bool value)
    : width_(width), height_(height), bits_(std::size_t(width) * height, value ? 1 : 0) {}

std::size_t BinaryMask::count() const {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

bool BinaryMask::any() const {
    return std::any_of(bits_.begin(), bits_.end(), [](std::uint8_t b) { return b != 0; });
}

BinaryMask rasterize_polygon_mask(const Polygon& poly, std::uint32_t width, std::uint32_t height) {
    BinaryMask mask(width, height);
    const std::size_t n = poly.vertices.size();
    if (n < 3) return mask;

    std::vector<double> xs;
    for (std::uint32_t y = 0; y < height; ++y) {
        const double yc = y + 0.5;
        xs.clear();
        for (std::size_t i = 0; i < n; ++i) {
            const Point2& a = poly.vertices[i];
            const Point2& b = poly.vertices[(i + 1) % n];
            // Half-open rule so shared vertices are counted once.
            if ((a.y <= yc && yc < b.y) || (b.y <= yc && yc < a.y)) {
                xs.push_back(a.x + (yc - a.y) * (b.x - a.x) / (b.y - a.y));
            }
        }
        std::sort(xs.begin(), xs.end());
        for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
            // Centers x + 0.5 in [xs[k], xs[k+1]).
            const double lo = std::ceil(xs[k] - 0.5);
            const double hi = std::ceil(xs[k + 1] - 0.5);  // exclusive
            const auto x0 = static_cast<std::int64_t>(std::max(0.0, lo));
            const auto x1 = static_cast<std::int64_t>(std::min<double>(width, hi));
            for (std::int64_t x = x0; x < x1; ++x) mask.set(static_cast<std::uint32_t>(x), y, true);
        }
    }
    return mask;
}

Point2 mask_centroid(const BinaryMask& mask) {
    double m00 = 0.0, m10 = 0.0, m01 = 0.0;
    for (std::uint32_t y = 0; y < mask.height(); ++y) {
        for (std::uint32_t x = 0; x < mask.width(); ++x) {
            if (!mask.at(x, y)) continue;
            m00 += 1.0;
            m10 += x + 0.5;
            m01 += y + 0.5;
        }
    }
    if (m00 == 0.0) throw Error(ErrorCode::EmptyMask, "centroid of an empty mask");
    return {m10 / m00, m01 / m00};
}

// =============================================================================
// Robust estimation
// =============================================================================

namespace {

double residual(const AffineTransform& t, const Match& m) {
    const Point2 p = apply_affine(t, {m.xs, m.ys});
    return std::hypot(p.x - m.xt, p.y - m.yt);
}

// Exact affine through three correspondences; false when the source triangle is degenerate.
bool solve_minimal(const Match& a, const Match& b, const Match& c, AffineTransform& out) {
    const double area2 = (b.xs - a.xs) * (c.ys - a.ys) - (c.xs - a.xs) * (b.ys - a.ys);
    if (std::abs(area2) < 1e-6) return false;
    Eigen::Matrix3d src;
    src << a.xs, a.ys, 1.0, b.xs, b.ys, 1.0, c.xs, c.ys, 1.0;
    const Eigen::Vector3d tx(a.xt, b.xt, c.xt);
    const Eigen::Vector3d ty(a.yt, b.yt, c.yt);
    const Eigen::PartialPivLU<Eigen::Matrix3d> lu(src);
    const Eigen::Vector3d rx = lu.solve(tx);
    const Eigen::Vector3d ry = lu.solve(ty);
    out = AffineTransform(rx[0], rx[1], rx[2], ry[0], ry[1], ry[2]);
    return std::abs(out.linear_det()) > 1e-12;
}

}  // namespace

AffineTransform fit_affine_least_squares(const std::vector<Match>& matches) {
    const auto n = static_cast<Eigen::Index>(matches.size());
    if (n < 3) throw Error(ErrorCode::TooFewMatches, "least-squares affine needs at least 3 matches");
    double cx = 0.0, cy = 0.0;
    for (const Match& m : matches) {
        cx += m.xs;
        cy += m.ys;
    }
    cx /= static_cast<double>(n);
    cy /= static_cast<double>(n);

    Eigen::MatrixXd design(n, 3);
    Eigen::VectorXd bx(n), by(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Match& m = matches[static_cast<std::size_t>(i)];
        design(i, 0) = m.xs - cx;
        design(i, 1) = m.ys - cy;
        design(i, 2) = 1.0;
        bx[i] = m.xt;
        by[i] = m.yt;
    }
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < 3) throw Error(ErrorCode::DegenerateConfiguration, "collinear correspondences");
    const Eigen::Vector3d px = qr.solve(bx);
    const Eigen::Vector3d py = qr.solve(by);
    return {px[0], px[1], px[2] - px[0] * cx - px[1] * cy, py[0], py[1], py[2] - py[0] * cx - py[1] * cy};
}

RansacResult estimate_affine_ransac(const MatchSet& matches, const RansacConfig& cfg) {
    const std::size_t n = matches.size();
    const std::size_t needed = std::max<std::size_t>(3, cfg.min_matches);
    if (n < needed) {
        throw Error(ErrorCode::TooFewMatches,
                    "RANSAC needs at least " + std::to_string(needed) + " matches, got " + std::to_string(n));
    }
    if (!(cfg.inlier_threshold > 0.0)) throw Error(ErrorCode::ConfigError, "inlier_threshold must be positive");

    const auto& ms = matches.matches;
    std::mt19937_64 rng(cfg.rng_seed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);

    std::size_t best_count = 0;
    AffineTransform best;
    bool found = false;
    for (std::uint32_t it = 0; it < cfg.iterations; ++it) {
        const std::size_t i = pick(rng);
        std::size_t j = pick(rng);
        std::size_t k = pick(rng);
        if (i == j || j == k || i == k) continue;
        AffineTransform candidate;
        if (!solve_minimal(ms[i], ms[j], ms[k], candidate)) continue;
        found = true;
        std::size_t count = 0;
        for (const Match& m : ms) {
            if (residual(candidate, m) <= cfg.inlier_threshold) ++count;
        }
        if (count > best_count) {
            best_count = count;
            best = candidate;
        }
    }
    if (!found) throw Error(ErrorCode::DegenerateConfiguration, "every minimal sample was collinear");

    std::vector<Match> consensus;
    for (const Match& m : ms) {
        if (residual(best, m) <= cfg.inlier_threshold) consensus.push_back(m);
    }
    RansacResult result;
    result.transform = fit_affine_least_squares(consensus);
    for (std::size_t i = 0; i < n; ++i) {
        if (residual(result.transform, ms[i]) <= cfg.inlier_threshold) result.inliers.push_back(i);
    }
    return result;
}

}  // namespace seamstitch
