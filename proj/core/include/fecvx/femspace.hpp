#pragma once

#include "fecvx/mesh.hpp"
#include "fecvx/quadrature.hpp"

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace fecvx {

/// Gradients of the three barycentric coordinates of element `e` (constant
/// per element).
std::array<Vec2, 3> barycentric_gradients(const Mesh& mesh, int e);

/// Barycentric coordinates of `p` with respect to element `e`.
std::array<double, 3> barycentric_coords(const Mesh& mesh, int e, const Vec2& p);

enum class DofKind { vertex, edge_midpoint };

struct DofInfo {
    Vec2 location;
    DofKind kind;
    int entity;  // vertex id or edge id
};

/// Continuous Lagrange trial space of degree 1 or 2 on a triangulation.
/// Local DOF order: the three vertices, then (degree 2) the midpoint DOFs of
/// the edges opposite each vertex.
class FESpace {
  public:
    FESpace() = default;

    const Mesh& mesh() const { return *mesh_; }
    int degree() const { return degree_; }
    int num_dofs() const { return static_cast<int>(dofs_.size()); }
    int dofs_per_element() const { return degree_ == 1 ? 3 : 6; }

    const std::vector<DofInfo>& dofs() const { return dofs_; }
    const std::vector<std::array<int, 6>>& element_dof_map() const { return element_dofs_; }
    std::array<int, 6> element_dofs(int e) const { return element_dofs_[e]; }

    bool dof_on_boundary(int r) const { return dof_on_boundary_[r]; }

    /// Shape function values at a barycentric point, local DOF order.
    void shape_values(const std::array<double, 3>& bary, double* out) const;
    /// Physical shape gradients on element `e` at a barycentric point.
    void shape_gradients(int e, const std::array<double, 3>& bary, Vec2* out) const;

    /// Gradients of the barycentric coordinates of element `e` (constant).
    const std::array<Vec2, 3>& barycentric_gradients(int e) const { return bary_grad_[e]; }

    double value(const Eigen::VectorXd& coeffs, int e, const std::array<double, 3>& bary) const;
    Vec2 grad(const Eigen::VectorXd& coeffs, int e, const std::array<double, 3>& bary) const;

    /// Element containing point `p` (ties broken toward the lowest element
    /// id). Returns the element id and the barycentric coordinates, or -1 if
    /// `p` lies outside the mesh.
    int locate(const Vec2& p, std::array<double, 3>* bary) const;

    friend FESpace build_trial_space(const Mesh& mesh, int degree);

  private:
    const Mesh* mesh_ = nullptr;
    int degree_ = 1;
    std::vector<DofInfo> dofs_;
    std::vector<std::array<int, 6>> element_dofs_;
    std::vector<std::array<Vec2, 3>> bary_grad_;
    std::vector<bool> dof_on_boundary_;
};

/// Builds the canonical Lagrange nodal space. Degree 1 has one DOF per vertex,
/// degree 2 adds one per edge.
FESpace build_trial_space(const Mesh& mesh, int degree);

/// Point evaluation of a coefficient vector; throws if `p` is outside the mesh.
double evaluate(const FESpace& space, const Eigen::VectorXd& coeffs, const Vec2& p);
/// Element-wise gradient at `p` (the containing element per `locate`).
Vec2 gradient(const FESpace& space, const Eigen::VectorXd& coeffs, const Vec2& p);

/// Lagrange interpolation: coefficient r is f evaluated at node r.
Eigen::VectorXd interpolate(const FESpace& space, const std::function<double(const Vec2&)>& f);

enum class TestKind { vertex_hat, edge_bubble };

struct TestFunction {
    int index;
    TestKind kind;
    int entity;                // vertex id or edge id
    std::vector<int> support;  // element ids
};

struct TestBasisOptions {
    bool include_boundary = true;  // keep boundary-node functions in the basis
    bool include_bubbles = true;   // quadratic edge bubbles alongside vertex hats
};

/// Nonnegative test basis: piecewise linear vertex hats plus quadratic edge
/// bubbles (the product of the two endpoint hats, peak value 1/4).
class TestBasis {
  public:
    const Mesh& mesh() const { return *mesh_; }
    const std::vector<TestFunction>& functions() const { return functions_; }
    int size() const { return static_cast<int>(functions_.size()); }
    const TestBasisOptions& options() const { return options_; }

    /// Value of test function `f` on element `e` at a barycentric point
    /// (zero if `e` is not in the support).
    double value(const TestFunction& f, int e, const std::array<double, 3>& bary) const;
    /// Physical gradient on element `e` at a barycentric point.
    Vec2 grad(const TestFunction& f, int e, const std::array<double, 3>& bary) const;

    friend TestBasis build_test_basis(const Mesh& mesh, const TestBasisOptions& options);

  private:
    const Mesh* mesh_ = nullptr;
    TestBasisOptions options_;
    std::vector<TestFunction> functions_;
};

TestBasis build_test_basis(const Mesh& mesh, const TestBasisOptions& options = {});

}  // namespace fecvx
