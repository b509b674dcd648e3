#include "fecvx/sdpsolver.hpp"

#include "fecvx/sdpmodel.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace fecvx;

namespace {

SolverResult solve_model(const SdpProblem& prob, const SolverConfig& cfg = {}) {
    return solve(to_cone_program(prob), cfg);
}

// min t  s.t.  [[1, 1], [1, t]] >= 0  (Schur: t >= 1)
SdpProblem schur_toy() {
    SdpProblem p;
    const int t = p.add_variable(1.0);
    PsdBlock blk = PsdBlock::make(2);
    blk.at(0, 0).constant = 1.0;
    blk.at(1, 0).constant = 1.0;
    blk.at(1, 1).add(t, 1.0);
    p.blocks.push_back(blk);
    return p;
}

}  // namespace

TEST_CASE("svec/smat round trip preserves inner products") {
    Eigen::MatrixXd A(3, 3), B(3, 3);
    A << 1, 2, 3, 2, 5, -1, 3, -1, 4;
    B << 2, 0, 1, 0, -3, 2, 1, 2, 0;
    CHECK(smat(svec(A), 3).isApprox(A, 1e-15));
    CHECK(svec(A).dot(svec(B)) == doctest::Approx((A * B).trace()).epsilon(1e-14));
}

TEST_CASE("schur toy: min t with [[1,1],[1,t]] psd gives t = 1") {
    const SolverResult r = solve_model(schur_toy());
    REQUIRE(r.status == SolveStatus::optimal);
    CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(r.residuals.gap <= 1e-6);
}

TEST_CASE("diagonal sdp is an lp: min x s.t. x >= 3") {
    SdpProblem p;
    const int x = p.add_variable(1.0);
    LinearConstraint c;
    c.kind = LinearConstraint::Kind::inequality_le;
    c.coeffs.emplace_back(x, -1.0);
    c.rhs = -3.0;
    p.linear.push_back(c);
    const SolverResult r = solve_model(p);
    REQUIRE(r.status == SolveStatus::optimal);
    CHECK(r.x[0] == doctest::Approx(3.0).epsilon(1e-7));
}

TEST_CASE("equality constrained lp") {
    // min x0 + x1 s.t. x0 + 2 x1 = 1, x0 >= 0, x1 >= 0  -> (0, 1/2)
    SdpProblem p;
    const int x0 = p.add_variable(1.0);
    const int x1 = p.add_variable(1.0);
    LinearConstraint eq;
    eq.kind = LinearConstraint::Kind::equality;
    eq.coeffs = {{x0, 1.0}, {x1, 2.0}};
    eq.rhs = 1.0;
    p.linear.push_back(eq);
    for (int v : {x0, x1}) {
        LinearConstraint c;
        c.kind = LinearConstraint::Kind::inequality_le;
        c.coeffs.emplace_back(v, -1.0);
        c.rhs = 0.0;
        p.linear.push_back(c);
    }
    const SolverResult r = solve_model(p);
    REQUIRE(r.status == SolveStatus::optimal);
    CHECK(r.x[0] == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(r.x[1] == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(r.primal_objective == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("redundant equality rows are removed by presolve") {
    SdpProblem p;
    const int x0 = p.add_variable(1.0);
    const int x1 = p.add_variable(1.0);
    for (int rep = 0; rep < 3; ++rep) {
        LinearConstraint eq;
        eq.kind = LinearConstraint::Kind::equality;
        eq.coeffs = {{x0, 1.0}, {x1, 2.0}};
        eq.rhs = 1.0;
        p.linear.push_back(eq);
    }
    for (int v : {x0, x1}) {
        LinearConstraint c;
        c.kind = LinearConstraint::Kind::inequality_le;
        c.coeffs.emplace_back(v, -1.0);
        c.rhs = 0.0;
        p.linear.push_back(c);
    }
    const SolverResult r = solve_model(p);
    REQUIRE(r.status == SolveStatus::optimal);
    CHECK(r.primal_objective == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("infeasible lp is detected") {
    // x <= -1 and x >= 1
    SdpProblem p;
    const int x = p.add_variable(1.0);
    LinearConstraint a, b;
    a.kind = b.kind = LinearConstraint::Kind::inequality_le;
    a.coeffs.emplace_back(x, 1.0);
    a.rhs = -1.0;
    b.coeffs.emplace_back(x, -1.0);
    b.rhs = -1.0;
    p.linear.push_back(a);
    p.linear.push_back(b);
    const SolverResult r = solve_model(p);
    CHECK(r.status == SolveStatus::infeasible);
}

TEST_CASE("unbounded lp is detected") {
    // min -x s.t. x >= 0
    SdpProblem p;
    const int x = p.add_variable(-1.0);
    LinearConstraint c;
    c.kind = LinearConstraint::Kind::inequality_le;
    c.coeffs.emplace_back(x, -1.0);
    c.rhs = 0.0;
    p.linear.push_back(c);
    const SolverResult r = solve_model(p);
    CHECK(r.status == SolveStatus::unbounded);
}

TEST_CASE("validate_kkt recomputes residuals independently") {
    const SdpProblem p = schur_toy();
    const ConeProgram cone = to_cone_program(p);
    SolverResult r = solve(cone);
    REQUIRE(r.status == SolveStatus::optimal);

    const KktReport rep = validate_kkt(cone, r);
    CHECK(rep.residuals.gap <= 1e-6);
    CHECK(rep.residuals.primal <= 1e-7);
    CHECK(rep.residuals.dual <= 1e-7);
    CHECK(rep.min_slack_eigenvalue >= -1e-6);
    CHECK(rep.min_dual_eigenvalue >= -1e-6);

    // Perturbing the primal point grows the recomputed primal residual.
    SolverResult perturbed = r;
    perturbed.x[0] += 1e-3;
    const KktReport rep2 = validate_kkt(cone, perturbed);
    CHECK(rep2.residuals.primal > rep.residuals.primal);
    CHECK(rep2.residuals.primal == doctest::Approx(1e-3 / (1.0 + cone.h.norm())).epsilon(0.2));
}

TEST_CASE("determinism: bit-identical repeat solves") {
    const SdpProblem p = schur_toy();
    const ConeProgram cone = to_cone_program(p);
    const SolverResult r1 = solve(cone);
    const SolverResult r2 = solve(cone);
    CHECK(r1.iterations == r2.iterations);
    CHECK(r1.primal_objective == r2.primal_objective);  // bitwise
    CHECK((r1.x - r2.x).norm() == 0.0);
}

TEST_CASE("random small sdps agree with the brute-force oracle") {
    std::mt19937 rng(20240817);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);

    int solved = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 2);  // 2 or 3 variables
        SdpProblem p;
        for (int i = 0; i < n; ++i) p.add_variable(unif(rng));

        // One or two random 2x2 blocks, strictly feasible at a random x0.
        Eigen::VectorXd x0(n);
        for (int i = 0; i < n; ++i) x0[i] = 0.5 * unif(rng);
        const int nblocks = 1 + static_cast<int>(rng() % 2);
        for (int b = 0; b < nblocks; ++b) {
            PsdBlock blk = PsdBlock::make(2);
            Eigen::MatrixXd at_x0 = Eigen::MatrixXd::Zero(2, 2);
            for (int v = 0; v < n; ++v) {
                Eigen::MatrixXd M(2, 2);
                const double a = unif(rng), c = unif(rng), d = unif(rng);
                M << a, c, c, d;
                blk.at(0, 0).add(v, M(0, 0));
                blk.at(1, 0).add(v, M(1, 0));
                blk.at(1, 1).add(v, M(1, 1));
                at_x0 += x0[v] * M;
            }
            // B(x0) = at_x0 + shift*I is strictly positive definite.
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(at_x0, Eigen::EigenvaluesOnly);
            const double shift = 0.3 - es.eigenvalues().minCoeff();
            blk.at(0, 0).constant = shift;
            blk.at(1, 1).constant = shift;
            p.blocks.push_back(blk);
        }
        // Box |x_i - x0_i| <= 1 keeps the problem bounded and the oracle cheap.
        for (int i = 0; i < n; ++i) {
            LinearConstraint up, lo;
            up.kind = lo.kind = LinearConstraint::Kind::inequality_le;
            up.coeffs.emplace_back(i, 1.0);
            up.rhs = x0[i] + 1.0;
            lo.coeffs.emplace_back(i, -1.0);
            lo.rhs = -(x0[i] - 1.0);
            p.linear.push_back(up);
            p.linear.push_back(lo);
        }

        SolverConfig cfg;
        const SolverResult r = solve_model(p, cfg);
        REQUIRE(r.status == SolveStatus::optimal);
        const KktReport rep = validate_kkt(to_cone_program(p), r);
        CHECK(rep.residuals.primal <= 1e-6);
        CHECK(rep.residuals.dual <= 1e-6);
        CHECK(rep.residuals.rel_gap <= 1e-6);

        Eigen::VectorXd lo = x0.array() - 1.0, hi = x0.array() + 1.0;
        const double oracle = fecvx::testing::brute_force_min(p, lo, hi, 21, 3, 1e-9);
        // The grid restricts the feasible set, so oracle >= optimum (up to
        // the feasibility slack); they must agree to grid resolution.
        CHECK(r.primal_objective <= oracle + 1e-6);
        CHECK(oracle - r.primal_objective <= 2e-2 * std::max(1.0, std::abs(oracle)));
        ++solved;
    }
    CHECK(solved == 20);
}

TEST_CASE("weak duality and slack psd hold at the returned optimum") {
    const SdpProblem p = schur_toy();
    const ConeProgram cone = to_cone_program(p);
    const SolverResult r = solve(cone);
    REQUIRE(r.status == SolveStatus::optimal);
    CHECK(r.primal_objective >= r.dual_objective - 1e-6);
    const KktReport rep = validate_kkt(cone, r);
    CHECK(rep.min_slack_eigenvalue >= -10.0 * 1e-7);
}
