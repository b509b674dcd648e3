#pragma once

#include "fecvx/hessian.hpp"
#include "fecvx/sdpsolver.hpp"

#include <functional>
#include <optional>
#include <variant>
#include <vector>

namespace fecvx {

using ScalarFn = std::function<double(const Vec2&)>;
using VectorFn = std::function<Vec2(const Vec2&)>;

/// Coefficient functions of the integrand
///   alpha |grad(u - v1)|^2 + beta |u - v2|^2 + gamma . grad u + f u.
/// Null functions are identically zero; alpha and beta must be nonnegative at
/// quadrature points for the epigraph reformulation to be exact.
struct ObjectiveSpec {
    ScalarFn alpha;
    ScalarFn beta;
    VectorFn gamma;
    ScalarFn f;
    VectorFn grad_v1;  // v1 enters only through its gradient
    ScalarFn v2;
};

struct LinearConstraint {
    enum class Kind { equality, inequality_le };
    Kind kind = Kind::equality;
    std::vector<std::pair<int, double>> coeffs;
    double rhs = 0.0;
};

struct AffineExpr {
    double constant = 0.0;
    std::vector<std::pair<int, double>> coeffs;

    void add(int var, double c) {
        if (c != 0.0) coeffs.emplace_back(var, c);
    }
    double eval(const Eigen::VectorXd& x) const {
        double v = constant;
        for (const auto& [i, c] : coeffs) v += c * x[i];
        return v;
    }
};

/// Symmetric matrix, affine in the variables, constrained PSD. Entries store
/// the lower triangle column-major: (0,0),(1,0),..,(m-1,0),(1,1),..
struct PsdBlock {
    int size = 0;
    std::vector<AffineExpr> entries;

    static int entry_index(int m, int i, int j);  // requires i >= j
    AffineExpr& at(int i, int j) { return entries[entry_index(size, i, j)]; }
    const AffineExpr& at(int i, int j) const { return entries[entry_index(size, i, j)]; }
    Eigen::MatrixXd eval(const Eigen::VectorXd& x) const;

    static PsdBlock make(int m) {
        PsdBlock b;
        b.size = m;
        b.entries.resize(m * (m + 1) / 2);
        return b;
    }
};

/// Block-structured semidefinite program over variables
/// [u DOFs | t_{i,j} | s_i | ...]: linear objective, linear constraints, and
/// small PSD blocks affine in the variables.
struct SdpProblem {
    int num_u = 0;  // leading trial-space coefficients
    std::vector<double> objective;
    std::vector<LinearConstraint> linear;
    std::vector<PsdBlock> blocks;

    int num_vars() const { return static_cast<int>(objective.size()); }
    int add_variable(double cost = 0.0) {
        objective.push_back(cost);
        return num_vars() - 1;
    }
};

/// Builds the quadrature-discretized objective with epigraph auxiliaries:
/// per quadrature point i one 2x2 block [[1, e_j],[e_j, t_{i,j}]] per
/// direction where alpha(x_i) > 0 and one [[1, g],[g, s_i]] where
/// beta(x_i) > 0; the t/s variables enter the cost with weight w_i alpha/beta.
/// Throws if alpha or beta is negative at a quadrature point.
SdpProblem build_objective(const FESpace& space, const QuadratureRule& rule,
                           const ObjectiveSpec& spec);

/// One 2x2 PSD block per Hessian form, linear in the u coefficients.
void add_convexity_constraints(SdpProblem& problem, const std::vector<HessianForm>& forms);

struct MeanZero {};
struct PointValue {
    Vec2 point;
    double value = 0.0;
};
struct GradientBox {
    Vec2 lo, hi;
};
struct BoundaryValues {
    ScalarFn g;
};
using ConstraintSpec = std::variant<MeanZero, PointValue, GradientBox, BoundaryValues>;

/// mean_zero: one equality sum_r u_r \int phi_r = 0. point_value: one
/// equality (a DOF row when the point is a Lagrange node). gradient_box:
/// componentwise bounds on grad u, imposed exactly per element for degree 1
/// and at quadrature points for degree 2. boundary_values: one equality per
/// boundary DOF.
void add_problem_constraints(SdpProblem& problem, const FESpace& space,
                             const QuadratureRule& rule, const ConstraintSpec& constraint);

/// Standard-form translation: equalities to A, inequalities to LP cone rows,
/// PSD blocks to svec slices (order preserved).
ConeProgram to_cone_program(const SdpProblem& problem);

/// Direct quadrature evaluation of the discrete functional J_h at `coeffs`
/// (independent of the epigraph reformulation).
double evaluate_functional(const FESpace& space, const QuadratureRule& rule,
                           const ObjectiveSpec& spec, const Eigen::VectorXd& coeffs);

}  // namespace fecvx
