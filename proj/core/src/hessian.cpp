#include "fecvx/hessian.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace fecvx {

namespace {

// Boundary edges on which a test function does not vanish identically.
std::vector<int> boundary_edges_of(const Mesh& mesh, const TestFunction& f) {
    std::vector<int> out;
    if (f.kind == TestKind::edge_bubble) {
        if (mesh.edges()[f.entity].is_boundary()) out.push_back(f.entity);
        return out;
    }
    for (int el : f.support)
        for (int e : mesh.element_edges(el)) {
            const Edge& ed = mesh.edges()[e];
            if (!ed.is_boundary()) continue;
            if (ed.vertex_ids[0] == f.entity || ed.vertex_ids[1] == f.entity) out.push_back(e);
        }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace

std::vector<HessianForm> assemble(const FESpace& trial, const TestBasis& test,
                                  bool with_boundary) {
    if (&trial.mesh() != &test.mesh())
        throw std::invalid_argument("assemble: trial and test spaces use different meshes");
    const Mesh& mesh = trial.mesh();
    const QuadratureRule rule = triangle_rule_degree4();
    const EdgeRule edge_rule = edge_gauss_rule(2);
    const int nloc = trial.dofs_per_element();

    std::vector<HessianForm> forms;
    forms.reserve(test.functions().size());

    for (const TestFunction& tf : test.functions()) {
        std::map<int, Mat2> acc;

        for (int e : tf.support) {
            const auto p = mesh.element_coords(e);
            const double area2 = 2.0 * mesh.element_area(e);
            const auto dofs = trial.element_dofs(e);
            for (const auto& qp : rule.points) {
                const double w = qp.weight * area2;
                const Vec2 gs = test.grad(tf, e, qp.bary);
                Vec2 gr[6];
                trial.shape_gradients(e, qp.bary, gr);
                for (int k = 0; k < nloc; ++k) {
                    Mat2& m = acc[dofs[k]];
                    for (int i = 0; i < 2; ++i)
                        for (int j = 0; j < 2; ++j) m(i, j) -= w * gr[k][i] * gs[j];
                }
            }
        }

        if (with_boundary) {
            for (int eid : boundary_edges_of(mesh, tf)) {
                const Edge& ed = mesh.edges()[eid];
                const int el = ed.adjacent_element_ids[0];
                const Vec2 pa = mesh.vertices()[ed.vertex_ids[0]].coords;
                const Vec2 pb = mesh.vertices()[ed.vertex_ids[1]].coords;
                const double len = (pb - pa).norm();
                const Vec2 nu = ed.outward_normal;
                const auto dofs = trial.element_dofs(el);
                for (const auto& [t, w] : edge_rule.points) {
                    const Vec2 x = (1.0 - t) * pa + t * pb;
                    const auto bary = barycentric_coords(mesh, el, x);
                    const double phi = test.value(tf, el, bary);
                    Vec2 gr[6];
                    trial.shape_gradients(el, bary, gr);
                    for (int k = 0; k < nloc; ++k) {
                        Mat2& m = acc[dofs[k]];
                        for (int i = 0; i < 2; ++i)
                            for (int j = 0; j < 2; ++j)
                                m(i, j) += w * len * gr[k][i] * phi * nu[j];
                    }
                }
            }
        }

        HessianForm form;
        form.test_index = tf.index;
        form.with_boundary_term = with_boundary;
        for (auto& [r, m] : acc) {
            const Mat2 sym = 0.5 * (m + m.transpose());
            form.entries.emplace_back(r, sym);
        }
        forms.push_back(std::move(form));
    }
    return forms;
}

HessianEvaluation evaluate_hessian(const HessianForm& form, const Eigen::VectorXd& coeffs) {
    HessianEvaluation ev;
    ev.matrix = form.apply(coeffs);
    ev.min_eigenvalue = sym2x2_min_eigenvalue(ev.matrix);
    return ev;
}

ConvexityReport check_fe_convexity(const std::vector<HessianForm>& forms,
                                   const Eigen::VectorXd& coeffs, double tol) {
    if (tol < 0.0) throw std::invalid_argument("check_fe_convexity: tol must be >= 0");
    ConvexityReport rep;
    rep.is_fe_convex = true;
    rep.min_eigenvalues.reserve(forms.size());
    bool first = true;
    for (const HessianForm& f : forms) {
        for (const auto& [r, m] : f.entries)
            if (r >= coeffs.size())
                throw std::invalid_argument("check_fe_convexity: coefficient vector too short");
        const double ev = sym2x2_min_eigenvalue(f.apply(coeffs));
        rep.min_eigenvalues.push_back(ev);
        if (first || ev < rep.worst_min_eigenvalue) {
            rep.worst_min_eigenvalue = ev;
            rep.worst_test_index = f.test_index;
            first = false;
        }
        if (ev < -tol) rep.is_fe_convex = false;
    }
    return rep;
}

Mat2 stencil_diagonal(const StencilValues& v, double /*h*/) {
    // v[i][j] = u(a + (i-1)h, b + (j-1)h)
    const double alpha = v[0][1] + v[2][1] - 2.0 * v[1][1];
    const double beta = 0.5 * (2.0 * v[1][1] + v[0][0] + v[2][2] -
                               (v[1][0] + v[1][2] + v[0][1] + v[2][1]));
    const double gamma = v[1][0] + v[1][2] - 2.0 * v[1][1];
    Mat2 m;
    m << alpha, beta, beta, gamma;
    return m;
}

Mat2 stencil_union_jack(const StencilValues& v, double /*h*/) {
    const double alpha = v[0][1] + v[2][1] - 2.0 * v[1][1];
    const double beta = 0.5 * (v[2][2] + v[0][0] - v[2][0] - v[0][2]);
    const double gamma = v[1][0] + v[1][2] - 2.0 * v[1][1];
    Mat2 m;
    m << alpha, beta, beta, gamma;
    return m;
}

}  // namespace fecvx
