#pragma once

#include <array>
#include <span>

namespace gridreg {

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point2&, const Point2&) = default;
};

inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }

double distance(Point2 a, Point2 b);

/// 2x3 affine map [[a, b, tx], [c, d, ty]]:
///   x' = a*x + b*y + tx
///   y' = c*x + d*y + ty
/// Used source-pixel -> reference-pixel throughout the library.
class AffineTransform2D {
public:
    /// Identity.
    constexpr AffineTransform2D() = default;

    /// Row-major entries {a, b, tx, c, d, ty}. Throws InputError if any is non-finite.
    explicit AffineTransform2D(const std::array<double, 6>& m);

    static AffineTransform2D identity() { return {}; }
    static AffineTransform2D translation(double tx, double ty);
    /// Linear part [[cos, -sin], [sin, cos]] about `center`; +90 deg sends
    /// (1, 0) to (0, 1).
    static AffineTransform2D rotation(double radians, Point2 center = {});

    Point2 apply(Point2 p) const noexcept {
        return {m_[0] * p.x + m_[1] * p.y + m_[2], m_[3] * p.x + m_[4] * p.y + m_[5]};
    }
    Point2 operator()(Point2 p) const noexcept { return apply(p); }

    double operator[](int i) const { return m_[i]; }
    const std::array<double, 6>& entries() const noexcept { return m_; }

    /// Determinant of the 2x2 linear part.
    double det() const noexcept { return m_[0] * m_[4] - m_[1] * m_[3]; }

    /// Throws DegenerateError when the linear part is singular.
    AffineTransform2D inverse() const;

    /// (*this)(other(p)).
    AffineTransform2D compose(const AffineTransform2D& other) const;

    friend bool operator==(const AffineTransform2D&, const AffineTransform2D&) = default;

private:
    std::array<double, 6> m_{1.0, 0.0, 0.0, 0.0, 1.0, 0.0};
};

inline Point2 apply_affine(const AffineTransform2D& t, Point2 p) { return t.apply(p); }

/// Unsigned area |cross(p2 - p1, p3 - p1)| / 2.
double triangle_area(Point2 p1, Point2 p2, Point2 p3);

struct PointPair {
    Point2 src;
    Point2 dst;
};

/// Collinearity threshold on the source triangle area, px^2.
inline constexpr double kMinTriangleArea = 1e-9;

/// Exact affine through three correspondences. Throws DegenerateError when
/// the source points are collinear (area < kMinTriangleArea).
AffineTransform2D estimate_affine_from_3(std::span<const PointPair, 3> pairs);

/// Ordinary least-squares affine over >= 3 correspondences. Throws
/// DegenerateError when the sources do not span the plane or the fitted
/// linear part is singular.
AffineTransform2D estimate_affine_lsq(std::span<const PointPair> pairs);

/// Largest entrywise absolute difference.
double max_abs_diff(const AffineTransform2D& a, const AffineTransform2D& b);

}  // namespace gridreg
