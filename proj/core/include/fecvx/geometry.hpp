#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>

namespace fecvx {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Axis-aligned rectangle used as a bounding box for structured meshes.
struct Rect {
    double xmin = 0.0, ymin = 0.0, xmax = 1.0, ymax = 1.0;

    double width() const { return xmax - xmin; }
    double height() const { return ymax - ymin; }
    bool degenerate() const { return width() <= 0.0 || height() <= 0.0; }

    static Rect unit_square() { return {0.0, 0.0, 1.0, 1.0}; }
};

inline double signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
    return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
}

inline Vec2 rotate90(const Vec2& v) { return Vec2(-v.y(), v.x()); }

/// Eigenvalues of a symmetric 2x2 matrix by the closed-form quadratic formula,
/// returned in increasing order.
inline std::array<double, 2> sym2x2_eigenvalues(const Mat2& m) {
    const double a = m(0, 0), b = 0.5 * (m(0, 1) + m(1, 0)), c = m(1, 1);
    const double mean = 0.5 * (a + c);
    const double disc = std::hypot(0.5 * (a - c), b);
    return {mean - disc, mean + disc};
}

inline double sym2x2_min_eigenvalue(const Mat2& m) { return sym2x2_eigenvalues(m)[0]; }

/// Interior angle of a triangle at vertex `at`, given the other two vertices.
inline double corner_angle(const Vec2& at, const Vec2& p, const Vec2& q) {
    const Vec2 u = p - at, v = q - at;
    return std::atan2(std::abs(u.x() * v.y() - u.y() * v.x()), u.dot(v));
}

}  // namespace fecvx
