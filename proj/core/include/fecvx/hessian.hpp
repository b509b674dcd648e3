#pragma once

#include "fecvx/femspace.hpp"

#include <vector>

namespace fecvx {

/// Weak Hessian of one test function: the sparse linear map from trial
/// coefficients to symmetric 2x2 matrices. Entry matrices are exactly
/// symmetric by construction.
struct HessianForm {
    int test_index = -1;
    std::vector<std::pair<int, Mat2>> entries;  // (trial DOF, matrix), sorted by DOF
    bool with_boundary_term = false;

    Mat2 apply(const Eigen::VectorXd& coeffs) const {
        Mat2 m = Mat2::Zero();
        for (const auto& [r, h] : entries) m += coeffs[r] * h;
        return m;
    }
};

struct HessianEvaluation {
    Mat2 matrix = Mat2::Zero();
    double min_eigenvalue = 0.0;
};

/// Assembles the weak Hessian forms of every test function against the trial
/// space. With `with_boundary` the boundary flux term is added, which makes
/// the forms vanish on affine functions even for boundary test functions.
std::vector<HessianForm> assemble(const FESpace& trial, const TestBasis& test,
                                  bool with_boundary);

HessianEvaluation evaluate_hessian(const HessianForm& form, const Eigen::VectorXd& coeffs);

struct ConvexityReport {
    bool is_fe_convex = false;
    int worst_test_index = -1;
    double worst_min_eigenvalue = 0.0;
    std::vector<double> min_eigenvalues;  // per form, in input order
};

/// A coefficient vector is FE-convex iff every form evaluates to a matrix
/// whose smallest eigenvalue is >= -tol.
ConvexityReport check_fe_convexity(const std::vector<HessianForm>& forms,
                                   const Eigen::VectorXd& coeffs, double tol = 1e-9);

/// Nodal values around a grid point (a,b): values[i][j] is the value at
/// (a + (i-1)h, b + (j-1)h).
using StencilValues = std::array<std::array<double, 3>, 3>;

template <typename F>
StencilValues sample_stencil(F&& f, double a, double b, double h) {
    StencilValues v;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) v[i][j] = f(Vec2(a + (i - 1) * h, b + (j - 1) * h));
    return v;
}

/// Closed-form weak Hessian at an interior node of the regular diagonal mesh
/// (piecewise linear trial and test), as a second-difference stencil.
Mat2 stencil_diagonal(const StencilValues& values, double h);

/// Same for an 8-neighbor node of the Union Jack mesh.
Mat2 stencil_union_jack(const StencilValues& values, double h);

}  // namespace fecvx
