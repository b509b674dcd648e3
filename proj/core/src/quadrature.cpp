#include "fecvx/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace fecvx {

QuadratureRule triangle_rule_degree4() {
    // Two symmetric orbits (Strang-Fix); barycentric weights sum to 1 and are
    // scaled by the reference area 1/2.
    const double a1 = 0.816847572980459, b1 = 0.091576213509771;
    const double w1 = 0.109951743655322;
    const double a2 = 0.108103018168070, b2 = 0.445948490915965;
    const double w2 = 0.223381589678011;

    QuadratureRule rule;
    rule.exactness_degree = 4;
    const auto orbit = [&rule](double a, double b, double w) {
        rule.points.push_back({{a, b, b}, 0.5 * w});
        rule.points.push_back({{b, a, b}, 0.5 * w});
        rule.points.push_back({{b, b, a}, 0.5 * w});
    };
    orbit(a1, b1, w1);
    orbit(a2, b2, w2);
    return rule;
}

EdgeRule edge_gauss_rule(int n) {
    EdgeRule r;
    switch (n) {
        case 1:
            r.points = {{0.5, 1.0}};
            break;
        case 2: {
            const double d = 0.5 / std::sqrt(3.0);
            r.points = {{0.5 - d, 0.5}, {0.5 + d, 0.5}};
            break;
        }
        case 3: {
            const double d = 0.5 * std::sqrt(3.0 / 5.0);
            r.points = {{0.5 - d, 5.0 / 18.0}, {0.5, 8.0 / 18.0}, {0.5 + d, 5.0 / 18.0}};
            break;
        }
        default:
            throw std::invalid_argument("edge_gauss_rule: n must be 1, 2 or 3");
    }
    return r;
}

}  // namespace fecvx
