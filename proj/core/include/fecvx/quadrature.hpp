#pragma once

#include "fecvx/geometry.hpp"

#include <array>
#include <vector>

namespace fecvx {

/// Quadrature rule on the reference triangle in barycentric coordinates.
/// Weights refer to the reference element (they sum to its area 1/2); the
/// physical weight on an element T is weight * 2 * |T|.
struct QuadratureRule {
    struct Point {
        std::array<double, 3> bary;
        double weight;
    };
    std::vector<Point> points;
    int exactness_degree = 0;

    /// Integrates `f` (given physical coordinates) over the triangle (a,b,c).
    template <typename F>
    double integrate(const Vec2& a, const Vec2& b, const Vec2& c, F&& f) const {
        const double area2 = 2.0 * std::abs(signed_area(a, b, c));
        double s = 0.0;
        for (const Point& p : points) {
            const Vec2 x = p.bary[0] * a + p.bary[1] * b + p.bary[2] * c;
            s += p.weight * area2 * f(x);
        }
        return s;
    }
};

/// The 6-point symmetric triangle rule, exact for polynomials of degree <= 4.
QuadratureRule triangle_rule_degree4();

/// Gauss rule on [0,1] with `n` points (n = 1..3), exact for degree 2n-1.
struct EdgeRule {
    std::vector<std::pair<double, double>> points;  // (parameter in [0,1], weight)
};
EdgeRule edge_gauss_rule(int n = 2);

}  // namespace fecvx
