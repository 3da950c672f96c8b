#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "seamstitch/match.hpp"

namespace seamstitch {

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point2&, const Point2&) = default;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
double norm(Point2 p);

/// 3x3 planar affine, row-major, last row fixed to [0, 0, 1].
class AffineTransform {
public:
    AffineTransform() = default;  // identity
    /// Builds from the top two rows: [a b c; d e f].
    AffineTransform(double a, double b, double c, double d, double e, double f);

    static AffineTransform identity() { return {}; }
    static AffineTransform translation(double dx, double dy);
    static AffineTransform scaling(double sx, double sy);
    /// Rotation by `radians` about `center`.
    static AffineTransform rotation(double radians, Point2 center = {});

    [[nodiscard]] double operator()(int row, int col) const { return m_[row * 3 + col]; }
    [[nodiscard]] const std::array<double, 9>& data() const { return m_; }

    /// Determinant of the upper-left 2x2 linear part.
    [[nodiscard]] double linear_det() const;
    /// Condition number sigma_max / sigma_min of the linear part (inf if singular).
    [[nodiscard]] double linear_cond() const;

    /// Frobenius norm of the difference of the six free parameters.
    [[nodiscard]] double frobenius_distance(const AffineTransform& other) const;

    friend AffineTransform operator*(const AffineTransform& lhs, const AffineTransform& rhs);
    friend bool operator==(const AffineTransform&, const AffineTransform&) = default;

private:
    std::array<double, 9> m_{1, 0, 0, 0, 1, 0, 0, 0, 1};
};

/// Pi(t * [p, 1]^T), always performing the homogeneous division.
/// Throws SingularProjection when |z| < 1e-12.
Point2 apply_affine(const AffineTransform& t, Point2 p);

/// Throws SingularTransform when |det| <= 1e-12.
AffineTransform invert_affine(const AffineTransform& t);

struct Rect {
    double x0 = 0.0;
    double y0 = 0.0;
    double x1 = 0.0;
    double y1 = 0.0;

    [[nodiscard]] double width() const { return x1 - x0; }
    [[nodiscard]] double height() const { return y1 - y0; }
    [[nodiscard]] bool contains(Point2 p) const { return p.x >= x0 && p.x < x1 && p.y >= y0 && p.y < y1; }
};

/// Counter-clockwise (positive shoelace area) vertex list. Empty means no region.
struct Polygon {
    std::vector<Point2> vertices;

    [[nodiscard]] bool empty() const { return vertices.empty(); }
    [[nodiscard]] double signed_area() const;
    [[nodiscard]] double area() const;
    [[nodiscard]] Rect bounds() const;
};

Polygon polygon_from_rect(const Rect& r);

/// Sutherland-Hodgman clip of a convex subject against an axis-aligned rectangle.
Polygon clip_polygon(const Polygon& subject, const Rect& clip_rect);

class BinaryMask {
public:
    BinaryMask() = default;
    BinaryMask(std::uint32_t width, std::uint32_t height, bool value = false);

    [[nodiscard]] std::uint32_t width() const { return width_; }
    [[nodiscard]] std::uint32_t height() const { return height_; }
    [[nodiscard]] bool at(std::uint32_t x, std::uint32_t y) const { return bits_[std::size_t(y) * width_ + x] != 0; }
    void set(std::uint32_t x, std::uint32_t y, bool v) { bits_[std::size_t(y) * width_ + x] = v ? 1 : 0; }
    [[nodiscard]] std::size_t count() const;
    [[nodiscard]] bool any() const;
    [[nodiscard]] const std::vector<std::uint8_t>& bits() const { return bits_; }

    friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

private:
    std::uint32_t width_ = 0;
    std::uint32_t height_ = 0;
    std::vector<std::uint8_t> bits_;
};

/// Sets pixel (x, y) iff its center (x + 0.5, y + 0.5) lies inside `poly`.
BinaryMask rasterize_polygon_mask(const Polygon& poly, std::uint32_t width, std::uint32_t height);

/// (M10/M00, M01/M00) over set-pixel centers. Throws EmptyMask.
Point2 mask_centroid(const BinaryMask& mask);

struct RansacConfig {
    double inlier_threshold = 3.0;
    std::uint32_t iterations = 2000;
    std::uint32_t min_matches = 3;
    std::uint64_t rng_seed = 0;
};

struct RansacResult {
    AffineTransform transform;
    std::vector<std::size_t> inliers;
};

/// Source->target affine from a 3-point minimal-sample RANSAC followed by a
/// least-squares refit on the best consensus set.
RansacResult estimate_affine_ransac(const MatchSet& matches, const RansacConfig& cfg);

/// Least-squares affine through all given correspondences (at least 3, not collinear).
AffineTransform fit_affine_least_squares(const std::vector<Match>& matches);

}  // namespace seamstitch
