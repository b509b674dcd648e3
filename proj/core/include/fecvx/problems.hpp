#pragma once

#include "fecvx/sdpmodel.hpp"

#include <string>
#include <vector>

namespace fecvx {

struct DomainSpec {
    enum class Kind { square_pattern, disk };
    Kind kind = Kind::square_pattern;
    Pattern pattern = Pattern::crisscross;
    int n = 2;
    Rect rect = Rect::unit_square();
    double radius = 1.0;
    int level = 2;

    Mesh make_mesh() const;
};

/// A functional-minimization benchmark: domain, integrand coefficients,
/// constraint list (FE-convexity is always imposed by the driver), and the
/// exact solution when one is known.
struct BenchmarkProblem {
    std::string name;
    DomainSpec domain;
    ObjectiveSpec objective;
    std::vector<ConstraintSpec> constraints;
    ScalarFn exact_solution;  // null when unknown
    VectorFn exact_gradient;  // null when unknown

    bool has_exact() const { return static_cast<bool>(exact_solution); }
};

/// Expected-revenue maximization over convex u with u(0) = 0 and
/// 0 <= grad u <= 1, encoded as minimization of the negated integrand.
/// The uniform-density, c = 0 variant carries the known exact solution
/// max{0, x1-a, x2-a, x1+x2-b} with a = 2/3, b = (4-sqrt(2))/3.
BenchmarkProblem monopolist(double c = 0.0);
BenchmarkProblem monopolist(double c, ScalarFn density);

double monopolist_exact_value(const Vec2& x);
Vec2 monopolist_exact_gradient(const Vec2& x);

enum class ProjectionNorm { L2, H1 };

/// Projection of `target` onto the FE-convex functions. The H1 variant needs
/// the target's gradient.
BenchmarkProblem projection(ProjectionNorm norm, ScalarFn target, VectorFn target_gradient = {},
                            std::vector<ConstraintSpec> extra_constraints = {});

/// Dirichlet functional 1/2 |grad u|^2 + f u over mean-zero convex functions
/// on the unit disk. Defaults to the two signed source discs at (0, -1) and
/// (0, 1).
BenchmarkProblem dirichlet_functional(ScalarFn f = {});

ScalarFn disk_source_field();

struct ErrorReport {
    double l2 = 0.0;
    double linf = 0.0;
};

/// L2 error by the element quadrature rule, Linf by a dense barycentric
/// sample lattice (45 points per element).
ErrorReport error_norms(const FESpace& space, const Eigen::VectorXd& coeffs,
                        const ScalarFn& exact);

/// Named scalar fields addressable from the CLI and config files:
/// zero, one, const:<v>, tilted_square, quadratic_bump, paraboloid,
/// monopolist_exact, disk_sources. Throws on unknown names.
ScalarFn named_scalar_field(const std::string& name);
/// Gradients for the named fields that have one (null otherwise).
VectorFn named_gradient_field(const std::string& name);

}  // namespace fecvx
