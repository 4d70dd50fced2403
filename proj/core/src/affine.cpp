#include "gridreg/affine.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "gridreg/error.hpp"

namespace gridreg {

double distance(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

AffineTransform2D::AffineTransform2D(const std::array<double, 6>& m) : m_(m) {
    for (double v : m_) {
        if (!std::isfinite(v)) {
            throw InputError("affine transform entries must be finite");
        }
    }
}

AffineTransform2D AffineTransform2D::translation(double tx, double ty) {
    return AffineTransform2D({1.0, 0.0, tx, 0.0, 1.0, ty});
}

AffineTransform2D AffineTransform2D::rotation(double radians, Point2 center) {
    const double c = std::cos(radians);
    const double s = std::sin(radians);
    // p' = R (p - center) + center
    return AffineTransform2D({c, -s, center.x - c * center.x + s * center.y,
                              s, c, center.y - s * center.x - c * center.y});
}

AffineTransform2D AffineTransform2D::inverse() const {
    const double d = det();
    if (std::abs(d) < 1e-300 || !std::isfinite(1.0 / d)) {
        throw DegenerateError("affine transform is not invertible");
    }
    const double ia = m_[4] / d;
    const double ib = -m_[1] / d;
    const double ic = -m_[3] / d;
    const double id = m_[0] / d;
    return AffineTransform2D({ia, ib, -(ia * m_[2] + ib * m_[5]),
                              ic, id, -(ic * m_[2] + id * m_[5])});
}

AffineTransform2D AffineTransform2D::compose(const AffineTransform2D& o) const {
    const auto& a = m_;
    const auto& b = o.m_;
    return AffineTransform2D({a[0] * b[0] + a[1] * b[3], a[0] * b[1] + a[1] * b[4],
                              a[0] * b[2] + a[1] * b[5] + a[2],
                              a[3] * b[0] + a[4] * b[3], a[3] * b[1] + a[4] * b[4],
                              a[3] * b[2] + a[4] * b[5] + a[5]});
}

double triangle_area(Point2 p1, Point2 p2, Point2 p3) {
    const Point2 u = p2 - p1;
    const Point2 v = p3 - p1;
    return std::abs(u.x * v.y - u.y * v.x) * 0.5;
}

AffineTransform2D estimate_affine_from_3(std::span<const PointPair, 3> pairs) {
    for (const auto& p : pairs) {
        if (!std::isfinite(p.src.x) || !std::isfinite(p.src.y) || !std::isfinite(p.dst.x) ||
            !std::isfinite(p.dst.y)) {
            throw InputError("correspondence coordinates must be finite");
        }
    }
    if (triangle_area(pairs[0].src, pairs[1].src, pairs[2].src) < kMinTriangleArea) {
        throw DegenerateError("source points are collinear");
    }
    // Solve in coordinates relative to the first source point; keeps the
    // 2x2 system well scaled for points far from the origin.
    const Point2 o = pairs[0].src;
    const double ux = pairs[1].src.x - o.x, uy = pairs[1].src.y - o.y;
    const double vx = pairs[2].src.x - o.x, vy = pairs[2].src.y - o.y;
    const double det = ux * vy - uy * vx;

    const auto solve_row = [&](double q0, double q1, double q2, double& lin_x, double& lin_y,
                               double& offset) {
        const double du = q1 - q0;
        const double dv = q2 - q0;
        lin_x = (du * vy - dv * uy) / det;
        lin_y = (dv * ux - du * vx) / det;
        offset = q0 - lin_x * o.x - lin_y * o.y;
    };
    std::array<double, 6> m{};
    solve_row(pairs[0].dst.x, pairs[1].dst.x, pairs[2].dst.x, m[0], m[1], m[2]);
    solve_row(pairs[0].dst.y, pairs[1].dst.y, pairs[2].dst.y, m[3], m[4], m[5]);
    return AffineTransform2D(m);
}

AffineTransform2D estimate_affine_lsq(std::span<const PointPair> pairs) {
    if (pairs.size() < 3) {
        throw DegenerateError("least-squares affine needs at least 3 correspondences");
    }
    // Centre the sources for conditioning.
    double cx = 0.0, cy = 0.0;
    for (const auto& p : pairs) {
        cx += p.src.x;
        cy += p.src.y;
    }
    cx /= static_cast<double>(pairs.size());
    cy /= static_cast<double>(pairs.size());

    Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
    Eigen::Vector3d atx = Eigen::Vector3d::Zero();
    Eigen::Vector3d aty = Eigen::Vector3d::Zero();
    for (const auto& p : pairs) {
        const Eigen::Vector3d row(p.src.x - cx, p.src.y - cy, 1.0);
        ata.noalias() += row * row.transpose();
        atx += row * p.dst.x;
        aty += row * p.dst.y;
    }
    // Spread of the centred sources; collinear sets have a null direction.
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> spread(ata.topLeftCorner<2, 2>());
    const double lo = spread.eigenvalues()(0);
    const double hi = spread.eigenvalues()(1);
    if (!(lo > 1e-9 * std::max(1.0, hi))) {
        throw DegenerateError("least-squares sources are collinear");
    }
    const Eigen::LDLT<Eigen::Matrix3d> ldlt(ata);
    const Eigen::Vector3d rx = ldlt.solve(atx);
    const Eigen::Vector3d ry = ldlt.solve(aty);
    std::array<double, 6> m{rx(0), rx(1), rx(2) - rx(0) * cx - rx(1) * cy,
                            ry(0), ry(1), ry(2) - ry(0) * cx - ry(1) * cy};
    for (double v : m) {
        if (!std::isfinite(v)) {
            throw DegenerateError("least-squares affine is not finite");
        }
    }
    AffineTransform2D t(m);
    if (std::abs(t.det()) < 1e-12) {
        throw DegenerateError("least-squares affine has a singular linear part");
    }
    return t;
}

double max_abs_diff(const AffineTransform2D& a, const AffineTransform2D& b) {
    double worst = 0.0;
    for (int i = 0; i < 6; ++i) {
        worst = std::max(worst, std::abs(a[i] - b[i]));
    }
    return worst;
}

}  // namespace gridreg
