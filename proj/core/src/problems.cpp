#include "fecvx/problems.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fecvx {

Mesh DomainSpec::make_mesh() const {
    if (kind == Kind::disk) return disk_mesh(radius, level);
    return structured_mesh(pattern, n, rect);
}

double monopolist_exact_value(const Vec2& x) {
    const double a = 2.0 / 3.0;
    const double b = (4.0 - std::sqrt(2.0)) / 3.0;
    return std::max({0.0, x.x() - a, x.y() - a, x.x() + x.y() - b});
}

Vec2 monopolist_exact_gradient(const Vec2& x) {
    const double a = 2.0 / 3.0;
    const double b = (4.0 - std::sqrt(2.0)) / 3.0;
    const std::array<double, 4> vals = {0.0, x.x() - a, x.y() - a, x.x() + x.y() - b};
    const int arg = static_cast<int>(std::max_element(vals.begin(), vals.end()) - vals.begin());
    switch (arg) {
        case 1: return Vec2(1.0, 0.0);
        case 2: return Vec2(0.0, 1.0);
        case 3: return Vec2(1.0, 1.0);
        default: return Vec2(0.0, 0.0);
    }
}

BenchmarkProblem monopolist(double c) {
    BenchmarkProblem p = monopolist(c, [](const Vec2&) { return 1.0; });
    p.name = "monopolist";
    if (c == 0.0) {
        p.exact_solution = [](const Vec2& x) { return monopolist_exact_value(x); };
        p.exact_gradient = [](const Vec2& x) { return monopolist_exact_gradient(x); };
    }
    return p;
}

BenchmarkProblem monopolist(double c, ScalarFn density) {
    if (c < 0.0) throw std::invalid_argument("monopolist: c must be >= 0");
    BenchmarkProblem p;
    p.name = "monopolist";
    p.domain.kind = DomainSpec::Kind::square_pattern;
    p.domain.pattern = Pattern::crisscross;
    p.domain.n = 2;

    // max int (grad u . x - u - c |grad u|^2) f dx
    // == min int (-f x . grad u + f u + c f |grad u|^2) dx
    p.objective.gamma = [density](const Vec2& x) { return Vec2(-density(x) * x); };
    p.objective.f = density;
    if (c > 0.0)
        p.objective.alpha = [c, density](const Vec2& x) { return c * density(x); };

    p.constraints.push_back(PointValue{Vec2(0.0, 0.0), 0.0});
    p.constraints.push_back(GradientBox{Vec2(0.0, 0.0), Vec2(1.0, 1.0)});
    return p;
}

BenchmarkProblem projection(ProjectionNorm norm, ScalarFn target, VectorFn target_gradient,
                            std::vector<ConstraintSpec> extra_constraints) {
    BenchmarkProblem p;
    p.domain.kind = DomainSpec::Kind::square_pattern;
    p.domain.pattern = Pattern::crisscross;
    p.domain.n = 8;
    p.objective.beta = [](const Vec2&) { return 1.0; };
    p.objective.v2 = target;
    if (norm == ProjectionNorm::H1) {
        p.name = "projection-h1";
        if (!target_gradient)
            throw std::invalid_argument("projection: the H1 norm needs the target gradient");
        p.objective.alpha = [](const Vec2&) { return 1.0; };
        p.objective.grad_v1 = target_gradient;
    } else {
        p.name = "projection-l2";
    }
    p.constraints = std::move(extra_constraints);
    return p;
}

ScalarFn disk_source_field() {
    return [](const Vec2& x) {
        if (x.x() * x.x() + (x.y() + 1.0) * (x.y() + 1.0) <= 0.25) return 1.0;
        if (x.x() * x.x() + (x.y() - 1.0) * (x.y() - 1.0) <= 0.25) return -1.0;
        return 0.0;
    };
}

BenchmarkProblem dirichlet_functional(ScalarFn f) {
    BenchmarkProblem p;
    p.name = "dirichlet";
    p.domain.kind = DomainSpec::Kind::disk;
    p.domain.radius = 1.0;
    p.domain.level = 2;
    p.objective.alpha = [](const Vec2&) { return 0.5; };
    p.objective.f = f ? std::move(f) : disk_source_field();
    p.constraints.push_back(MeanZero{});
    return p;
}

ErrorReport error_norms(const FESpace& space, const Eigen::VectorXd& coeffs,
                        const ScalarFn& exact) {
    if (!exact) throw std::invalid_argument("error_norms: exact solution not evaluable");
    const Mesh& mesh = space.mesh();
    const QuadratureRule rule = triangle_rule_degree4();
    ErrorReport rep;

    double l2sq = 0.0;
    for (const Element& el : mesh.elements()) {
        const auto p = mesh.element_coords(el.id);
        const double area2 = 2.0 * mesh.element_area(el.id);
        for (const auto& qp : rule.points) {
            const Vec2 x = qp.bary[0] * p[0] + qp.bary[1] * p[1] + qp.bary[2] * p[2];
            const double d = space.value(coeffs, el.id, qp.bary) - exact(x);
            l2sq += qp.weight * area2 * d * d;
        }
    }
    rep.l2 = std::sqrt(l2sq);

    // Fixed barycentric lattice, 45 points per element.
    constexpr int k = 8;
    double linf = 0.0;
    for (const Element& el : mesh.elements()) {
        const auto p = mesh.element_coords(el.id);
        for (int i = 0; i <= k; ++i) {
            for (int j = 0; i + j <= k; ++j) {
                const std::array<double, 3> bary = {double(i) / k, double(j) / k,
                                                    double(k - i - j) / k};
                const Vec2 x = bary[0] * p[0] + bary[1] * p[1] + bary[2] * p[2];
                linf = std::max(linf, std::abs(space.value(coeffs, el.id, bary) - exact(x)));
            }
        }
    }
    rep.linf = linf;
    return rep;
}

ScalarFn named_scalar_field(const std::string& name) {
    if (name == "zero") return [](const Vec2&) { return 0.0; };
    if (name == "one") return [](const Vec2&) { return 1.0; };
    if (name.rfind("const:", 0) == 0) {
        const double v = std::stod(name.substr(6));
        return [v](const Vec2&) { return v; };
    }
    if (name == "tilted_square")
        return [](const Vec2& x) {
            const double t = x.y() - 0.5 * x.x() - 0.25;
            return t * t;
        };
    if (name == "quadratic_bump")
        return [](const Vec2& x) { return -(x - Vec2(0.5, 0.5)).squaredNorm(); };
    if (name == "paraboloid") return [](const Vec2& x) { return 0.5 * x.squaredNorm(); };
    if (name == "monopolist_exact")
        return [](const Vec2& x) { return monopolist_exact_value(x); };
    if (name == "disk_sources") return disk_source_field();
    throw std::invalid_argument("unknown scalar field: " + name);
}

VectorFn named_gradient_field(const std::string& name) {
    if (name == "zero" || name == "one" || name.rfind("const:", 0) == 0)
        return [](const Vec2&) { return Vec2::Zero().eval(); };
    if (name == "tilted_square")
        return [](const Vec2& x) {
            const double t = x.y() - 0.5 * x.x() - 0.25;
            return Vec2(-t, 2.0 * t);
        };
    if (name == "quadratic_bump")
        return [](const Vec2& x) { return Vec2(-2.0 * (x - Vec2(0.5, 0.5))); };
    if (name == "paraboloid") return [](const Vec2& x) { return Vec2(x); };
    if (name == "monopolist_exact")
        return [](const Vec2& x) { return monopolist_exact_gradient(x); };
    return {};
}

}  // namespace fecvx
