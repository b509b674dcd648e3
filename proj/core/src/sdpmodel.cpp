#include "fecvx/sdpmodel.hpp"

#include <cmath>
#include <stdexcept>

namespace fecvx {

int PsdBlock::entry_index(int m, int i, int j) {
    // lower triangle, column-major: column j contributes (m - j) entries
    return j * m - j * (j - 1) / 2 + (i - j);
}

Eigen::MatrixXd PsdBlock::eval(const Eigen::VectorXd& x) const {
    Eigen::MatrixXd M(size, size);
    for (int j = 0; j < size; ++j)
        for (int i = j; i < size; ++i) {
            const double v = at(i, j).eval(x);
            M(i, j) = v;
            M(j, i) = v;
        }
    return M;
}

SdpProblem build_objective(const FESpace& space, const QuadratureRule& rule,
                           const ObjectiveSpec& spec) {
    const Mesh& mesh = space.mesh();
    SdpProblem prob;
    prob.num_u = space.num_dofs();
    prob.objective.assign(space.num_dofs(), 0.0);

    const int nloc = space.dofs_per_element();
    double shp[6];
    Vec2 grd[6];

    for (const Element& el : mesh.elements()) {
        const auto p = mesh.element_coords(el.id);
        const double area2 = 2.0 * mesh.element_area(el.id);
        const auto dofs = space.element_dofs(el.id);
        for (const auto& qp : rule.points) {
            const double w = qp.weight * area2;
            const Vec2 x = qp.bary[0] * p[0] + qp.bary[1] * p[1] + qp.bary[2] * p[2];
            space.shape_values(qp.bary, shp);
            space.shape_gradients(el.id, qp.bary, grd);

            const double a = spec.alpha ? spec.alpha(x) : 0.0;
            const double b = spec.beta ? spec.beta(x) : 0.0;
            if (a < 0.0)
                throw std::invalid_argument("build_objective: alpha negative at a quadrature point");
            if (b < 0.0)
                throw std::invalid_argument("build_objective: beta negative at a quadrature point");

            if (spec.gamma) {
                const Vec2 g = spec.gamma(x);
                for (int k = 0; k < nloc; ++k) prob.objective[dofs[k]] += w * g.dot(grd[k]);
            }
            if (spec.f) {
                const double fv = spec.f(x);
                for (int k = 0; k < nloc; ++k) prob.objective[dofs[k]] += w * fv * shp[k];
            }

            if (a > 0.0) {
                const Vec2 gv1 = spec.grad_v1 ? spec.grad_v1(x) : Vec2::Zero();
                for (int j = 0; j < 2; ++j) {
                    const int t = prob.add_variable(w * a);
                    PsdBlock blk = PsdBlock::make(2);
                    blk.at(0, 0).constant = 1.0;
                    blk.at(1, 0).constant = -gv1[j];
                    for (int k = 0; k < nloc; ++k) blk.at(1, 0).add(dofs[k], grd[k][j]);
                    blk.at(1, 1).add(t, 1.0);
                    prob.blocks.push_back(std::move(blk));
                }
            }
            if (b > 0.0) {
                const double v2 = spec.v2 ? spec.v2(x) : 0.0;
                const int s = prob.add_variable(w * b);
                PsdBlock blk = PsdBlock::make(2);
                blk.at(0, 0).constant = 1.0;
                blk.at(1, 0).constant = -v2;
                for (int k = 0; k < nloc; ++k) blk.at(1, 0).add(dofs[k], shp[k]);
                blk.at(1, 1).add(s, 1.0);
                prob.blocks.push_back(std::move(blk));
            }
        }
    }
    return prob;
}

void add_convexity_constraints(SdpProblem& problem, const std::vector<HessianForm>& forms) {
    for (const HessianForm& f : forms) {
        for (const auto& [r, m] : f.entries)
            if (r >= problem.num_u)
                throw std::invalid_argument(
                    "add_convexity_constraints: forms refer to an unknown trial space");
        PsdBlock blk = PsdBlock::make(2);
        for (const auto& [r, m] : f.entries) {
            blk.at(0, 0).add(r, m(0, 0));
            blk.at(1, 0).add(r, m(1, 0));
            blk.at(1, 1).add(r, m(1, 1));
        }
        problem.blocks.push_back(std::move(blk));
    }
}

namespace {

std::vector<double> basis_integrals(const FESpace& space, const QuadratureRule& rule) {
    const Mesh& mesh = space.mesh();
    std::vector<double> integral(space.num_dofs(), 0.0);
    double shp[6];
    for (const Element& el : mesh.elements()) {
        const double area2 = 2.0 * mesh.element_area(el.id);
        const auto dofs = space.element_dofs(el.id);
        for (const auto& qp : rule.points) {
            space.shape_values(qp.bary, shp);
            for (int k = 0; k < space.dofs_per_element(); ++k)
                integral[dofs[k]] += qp.weight * area2 * shp[k];
        }
    }
    return integral;
}

}  // namespace

void add_problem_constraints(SdpProblem& problem, const FESpace& space,
                             const QuadratureRule& rule, const ConstraintSpec& constraint) {
    const Mesh& mesh = space.mesh();

    if (std::holds_alternative<MeanZero>(constraint)) {
        LinearConstraint c;
        c.kind = LinearConstraint::Kind::equality;
        const auto integral = basis_integrals(space, rule);
        for (int r = 0; r < space.num_dofs(); ++r)
            if (integral[r] != 0.0) c.coeffs.emplace_back(r, integral[r]);
        c.rhs = 0.0;
        problem.linear.push_back(std::move(c));
        return;
    }

    if (const auto* pv = std::get_if<PointValue>(&constraint)) {
        LinearConstraint c;
        c.kind = LinearConstraint::Kind::equality;
        c.rhs = pv->value;
        for (int r = 0; r < space.num_dofs(); ++r) {
            if ((space.dofs()[r].location - pv->point).norm() <= 1e-12) {
                c.coeffs.emplace_back(r, 1.0);
                problem.linear.push_back(std::move(c));
                return;
            }
        }
        std::array<double, 3> bary;
        const int e = space.locate(pv->point, &bary);
        if (e < 0) throw std::invalid_argument("point_value: point outside the domain");
        double shp[6];
        space.shape_values(bary, shp);
        const auto dofs = space.element_dofs(e);
        for (int k = 0; k < space.dofs_per_element(); ++k)
            if (shp[k] != 0.0) c.coeffs.emplace_back(dofs[k], shp[k]);
        problem.linear.push_back(std::move(c));
        return;
    }

    if (const auto* gb = std::get_if<GradientBox>(&constraint)) {
        Vec2 grd[6];
        const auto add_rows = [&](int e, const std::array<double, 3>& bary) {
            space.shape_gradients(e, bary, grd);
            const auto dofs = space.element_dofs(e);
            for (int j = 0; j < 2; ++j) {
                LinearConstraint up, lo;
                up.kind = lo.kind = LinearConstraint::Kind::inequality_le;
                up.rhs = gb->hi[j];
                lo.rhs = -gb->lo[j];
                for (int k = 0; k < space.dofs_per_element(); ++k) {
                    if (grd[k][j] == 0.0) continue;
                    up.coeffs.emplace_back(dofs[k], grd[k][j]);
                    lo.coeffs.emplace_back(dofs[k], -grd[k][j]);
                }
                problem.linear.push_back(std::move(up));
                problem.linear.push_back(std::move(lo));
            }
        };
        for (const Element& el : mesh.elements()) {
            if (space.degree() == 1) {
                add_rows(el.id, {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
            } else {
                for (const auto& qp : rule.points) add_rows(el.id, qp.bary);
            }
        }
        return;
    }

    const auto& bv = std::get<BoundaryValues>(constraint);
    for (int r = 0; r < space.num_dofs(); ++r) {
        if (!space.dof_on_boundary(r)) continue;
        LinearConstraint c;
        c.kind = LinearConstraint::Kind::equality;
        c.coeffs.emplace_back(r, 1.0);
        c.rhs = bv.g(space.dofs()[r].location);
        problem.linear.push_back(std::move(c));
    }
}

ConeProgram to_cone_program(const SdpProblem& problem) {
    const int n = problem.num_vars();
    ConeProgram prog;
    prog.c = Eigen::Map<const Eigen::VectorXd>(problem.objective.data(), n);

    std::vector<Eigen::Triplet<double>> ta, tg;
    std::vector<double> bvals, hvals;
    int eq = 0, ineq = 0;
    for (const LinearConstraint& c : problem.linear)
        (c.kind == LinearConstraint::Kind::equality ? eq : ineq) += 1;
    prog.dims.lp = ineq;

    int erow = 0, irow = 0;
    for (const LinearConstraint& c : problem.linear) {
        if (c.kind == LinearConstraint::Kind::equality) {
            for (const auto& [v, coef] : c.coeffs) ta.emplace_back(erow, v, coef);
            bvals.push_back(c.rhs);
            ++erow;
        } else {
            for (const auto& [v, coef] : c.coeffs) tg.emplace_back(irow, v, coef);
            hvals.push_back(c.rhs);
            ++irow;
        }
    }

    const double rt2 = std::sqrt(2.0);
    int offset = ineq;
    for (const PsdBlock& blk : problem.blocks) {
        prog.dims.psd.push_back(blk.size);
        int k = 0;
        for (int j = 0; j < blk.size; ++j) {
            for (int i = j; i < blk.size; ++i, ++k) {
                const AffineExpr& e = blk.entries[k];
                const double scale = (i == j) ? 1.0 : rt2;
                // s slice must equal svec(B(x)), so h = svec(const part) and
                // G columns are -svec(coefficient matrices)
                hvals.push_back(scale * e.constant);
                for (const auto& [v, coef] : e.coeffs)
                    tg.emplace_back(offset + k, v, -scale * coef);
            }
        }
        offset += svec_size(blk.size);
    }

    prog.A.resize(eq, n);
    prog.A.setFromTriplets(ta.begin(), ta.end());
    prog.b = Eigen::Map<const Eigen::VectorXd>(bvals.data(), eq);
    prog.G.resize(offset, n);
    prog.G.setFromTriplets(tg.begin(), tg.end());
    prog.h = Eigen::Map<const Eigen::VectorXd>(hvals.data(), offset);
    return prog;
}

double evaluate_functional(const FESpace& space, const QuadratureRule& rule,
                           const ObjectiveSpec& spec, const Eigen::VectorXd& coeffs) {
    const Mesh& mesh = space.mesh();
    double total = 0.0;
    for (const Element& el : mesh.elements()) {
        const auto p = mesh.element_coords(el.id);
        const double area2 = 2.0 * mesh.element_area(el.id);
        for (const auto& qp : rule.points) {
            const double w = qp.weight * area2;
            const Vec2 x = qp.bary[0] * p[0] + qp.bary[1] * p[1] + qp.bary[2] * p[2];
            const double u = space.value(coeffs, el.id, qp.bary);
            const Vec2 gu = space.grad(coeffs, el.id, qp.bary);
            double val = 0.0;
            if (spec.alpha) {
                const Vec2 gv1 = spec.grad_v1 ? spec.grad_v1(x) : Vec2::Zero();
                val += spec.alpha(x) * (gu - gv1).squaredNorm();
            }
            if (spec.beta) {
                const double v2 = spec.v2 ? spec.v2(x) : 0.0;
                val += spec.beta(x) * (u - v2) * (u - v2);
            }
            if (spec.gamma) val += spec.gamma(x).dot(gu);
            if (spec.f) val += spec.f(x) * u;
            total += w * val;
        }
    }
    return total;
}

}  // namespace fecvx
