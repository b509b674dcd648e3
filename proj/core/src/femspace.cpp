#include "fecvx/femspace.hpp"

#include <cmath>
#include <stdexcept>

namespace fecvx {

std::array<Vec2, 3> barycentric_gradients(const Mesh& mesh, int e) {
    const auto p = mesh.element_coords(e);
    const double inv2a = 1.0 / (2.0 * signed_area(p[0], p[1], p[2]));
    std::array<Vec2, 3> g;
    for (int k = 0; k < 3; ++k) {
        // grad(lambda_k) is normal to the opposite edge, scaled by 1/height.
        const Vec2 edge = p[(k + 2) % 3] - p[(k + 1) % 3];
        g[k] = inv2a * rotate90(edge);
    }
    return g;
}

std::array<double, 3> barycentric_coords(const Mesh& mesh, int e, const Vec2& p) {
    const auto v = mesh.element_coords(e);
    const double a = signed_area(v[0], v[1], v[2]);
    return {signed_area(p, v[1], v[2]) / a, signed_area(v[0], p, v[2]) / a,
            signed_area(v[0], v[1], p) / a};
}

FESpace build_trial_space(const Mesh& mesh, int degree) {
    if (degree != 1 && degree != 2)
        throw std::invalid_argument("build_trial_space: unsupported degree");

    FESpace s;
    s.mesh_ = &mesh;
    s.degree_ = degree;

    for (const Vertex& v : mesh.vertices())
        s.dofs_.push_back({v.coords, DofKind::vertex, v.id});
    if (degree == 2) {
        for (const Edge& e : mesh.edges()) {
            const Vec2 mid = 0.5 * (mesh.vertices()[e.vertex_ids[0]].coords +
                                    mesh.vertices()[e.vertex_ids[1]].coords);
            s.dofs_.push_back({mid, DofKind::edge_midpoint, e.id});
        }
    }

    s.element_dofs_.resize(mesh.num_elements());
    s.bary_grad_.resize(mesh.num_elements());
    for (const Element& el : mesh.elements()) {
        std::array<int, 6>& d = s.element_dofs_[el.id];
        d = {el.vertex_ids[0], el.vertex_ids[1], el.vertex_ids[2], -1, -1, -1};
        if (degree == 2)
            for (int k = 0; k < 3; ++k)
                d[3 + k] = mesh.num_vertices() + mesh.element_edges(el.id)[k];
        s.bary_grad_[el.id] = barycentric_gradients(mesh, el.id);
    }

    s.dof_on_boundary_.assign(s.dofs_.size(), false);
    for (int r = 0; r < s.num_dofs(); ++r) {
        const DofInfo& d = s.dofs_[r];
        if (d.kind == DofKind::vertex)
            s.dof_on_boundary_[r] = mesh.vertex_on_boundary(d.entity);
        else
            s.dof_on_boundary_[r] = mesh.edges()[d.entity].is_boundary();
    }
    return s;
}

void FESpace::shape_values(const std::array<double, 3>& bary, double* out) const {
    const double l0 = bary[0], l1 = bary[1], l2 = bary[2];
    if (degree_ == 1) {
        out[0] = l0;
        out[1] = l1;
        out[2] = l2;
        return;
    }
    out[0] = l0 * (2.0 * l0 - 1.0);
    out[1] = l1 * (2.0 * l1 - 1.0);
    out[2] = l2 * (2.0 * l2 - 1.0);
    out[3] = 4.0 * l1 * l2;  // midpoint of the edge opposite vertex 0
    out[4] = 4.0 * l2 * l0;
    out[5] = 4.0 * l0 * l1;
}

void FESpace::shape_gradients(int e, const std::array<double, 3>& bary, Vec2* out) const {
    const auto& g = bary_grad_[e];
    if (degree_ == 1) {
        out[0] = g[0];
        out[1] = g[1];
        out[2] = g[2];
        return;
    }
    const double l0 = bary[0], l1 = bary[1], l2 = bary[2];
    out[0] = (4.0 * l0 - 1.0) * g[0];
    out[1] = (4.0 * l1 - 1.0) * g[1];
    out[2] = (4.0 * l2 - 1.0) * g[2];
    out[3] = 4.0 * (l1 * g[2] + l2 * g[1]);
    out[4] = 4.0 * (l2 * g[0] + l0 * g[2]);
    out[5] = 4.0 * (l0 * g[1] + l1 * g[0]);
}

double FESpace::value(const Eigen::VectorXd& coeffs, int e,
                      const std::array<double, 3>& bary) const {
    double shp[6];
    shape_values(bary, shp);
    const auto& d = element_dofs_[e];
    double v = 0.0;
    for (int k = 0; k < dofs_per_element(); ++k) v += coeffs[d[k]] * shp[k];
    return v;
}

Vec2 FESpace::grad(const Eigen::VectorXd& coeffs, int e, const std::array<double, 3>& bary) const {
    Vec2 g[6];
    shape_gradients(e, bary, g);
    const auto& d = element_dofs_[e];
    Vec2 v = Vec2::Zero();
    for (int k = 0; k < dofs_per_element(); ++k) v += coeffs[d[k]] * g[k];
    return v;
}

int FESpace::locate(const Vec2& p, std::array<double, 3>* bary) const {
    constexpr double tol = 1e-12;
    for (const Element& el : mesh_->elements()) {
        const auto b = barycentric_coords(*mesh_, el.id, p);
        if (b[0] >= -tol && b[1] >= -tol && b[2] >= -tol) {
            if (bary) *bary = b;
            return el.id;
        }
    }
    return -1;
}

double evaluate(const FESpace& space, const Eigen::VectorXd& coeffs, const Vec2& p) {
    std::array<double, 3> bary;
    const int e = space.locate(p, &bary);
    if (e < 0) throw std::invalid_argument("evaluate: point outside the mesh");
    return space.value(coeffs, e, bary);
}

Vec2 gradient(const FESpace& space, const Eigen::VectorXd& coeffs, const Vec2& p) {
    std::array<double, 3> bary;
    const int e = space.locate(p, &bary);
    if (e < 0) throw std::invalid_argument("gradient: point outside the mesh");
    return space.grad(coeffs, e, bary);
}

Eigen::VectorXd interpolate(const FESpace& space, const std::function<double(const Vec2&)>& f) {
    Eigen::VectorXd coeffs(space.num_dofs());
    for (int r = 0; r < space.num_dofs(); ++r) coeffs[r] = f(space.dofs()[r].location);
    return coeffs;
}

TestBasis build_test_basis(const Mesh& mesh, const TestBasisOptions& options) {
    TestBasis basis;
    basis.mesh_ = &mesh;
    basis.options_ = options;

    int index = 0;
    for (const Vertex& v : mesh.vertices()) {
        if (!options.include_boundary && mesh.vertex_on_boundary(v.id)) continue;
        TestFunction f;
        f.index = index++;
        f.kind = TestKind::vertex_hat;
        f.entity = v.id;
        f.support = mesh.vertex_star(v.id);
        basis.functions_.push_back(std::move(f));
    }
    if (options.include_bubbles) {
        for (const Edge& e : mesh.edges()) {
            if (!options.include_boundary && e.is_boundary()) continue;
            TestFunction f;
            f.index = index++;
            f.kind = TestKind::edge_bubble;
            f.entity = e.id;
            f.support.push_back(e.adjacent_element_ids[0]);
            if (e.adjacent_element_ids[1] >= 0) f.support.push_back(e.adjacent_element_ids[1]);
            basis.functions_.push_back(std::move(f));
        }
    }
    return basis;
}

namespace {

// Local barycentric indices of a test function on one support element:
// the vertex for a hat, the two edge endpoints for a bubble.
std::array<int, 2> local_indices(const Mesh& mesh, const TestFunction& f, int e) {
    const Element& el = mesh.elements()[e];
    if (f.kind == TestKind::vertex_hat) {
        for (int k = 0; k < 3; ++k)
            if (el.vertex_ids[k] == f.entity) return {k, -1};
        return {-1, -1};
    }
    const Edge& ed = mesh.edges()[f.entity];
    std::array<int, 2> loc{-1, -1};
    for (int k = 0; k < 3; ++k) {
        if (el.vertex_ids[k] == ed.vertex_ids[0]) loc[0] = k;
        if (el.vertex_ids[k] == ed.vertex_ids[1]) loc[1] = k;
    }
    return loc;
}

}  // namespace

double TestBasis::value(const TestFunction& f, int e, const std::array<double, 3>& bary) const {
    const auto loc = local_indices(*mesh_, f, e);
    if (loc[0] < 0) return 0.0;
    if (f.kind == TestKind::vertex_hat) return bary[loc[0]];
    if (loc[1] < 0) return 0.0;
    return bary[loc[0]] * bary[loc[1]];
}

Vec2 TestBasis::grad(const TestFunction& f, int e, const std::array<double, 3>& bary) const {
    const auto loc = local_indices(*mesh_, f, e);
    if (loc[0] < 0) return Vec2::Zero();
    const auto g = barycentric_gradients(*mesh_, e);
    if (f.kind == TestKind::vertex_hat) return g[loc[0]];
    if (loc[1] < 0) return Vec2::Zero();
    return bary[loc[0]] * g[loc[1]] + bary[loc[1]] * g[loc[0]];
}

}  // namespace fecvx
