#include "fecvx/adaptivity.hpp"

#include <chrono>
#include <cmath>

namespace fecvx {

ErrorIndicators estimate(const Mesh& mesh, const FESpace& space, const Eigen::VectorXd& coeffs) {
    const EdgeRule rule = edge_gauss_rule(2);
    Eigen::VectorXd eta_sq = Eigen::VectorXd::Zero(mesh.num_elements());

    for (const Edge& e : mesh.edges()) {
        if (e.is_boundary()) continue;
        const int t1 = e.adjacent_element_ids[0];
        const int t2 = e.adjacent_element_ids[1];
        const Vec2 pa = mesh.vertices()[e.vertex_ids[0]].coords;
        const Vec2 pb = mesh.vertices()[e.vertex_ids[1]].coords;
        const double len = (pb - pa).norm();
        double integral = 0.0;
        for (const auto& [t, w] : rule.points) {
            const Vec2 x = (1.0 - t) * pa + t * pb;
            const Vec2 g1 = space.grad(coeffs, t1, barycentric_coords(mesh, t1, x));
            const Vec2 g2 = space.grad(coeffs, t2, barycentric_coords(mesh, t2, x));
            integral += w * len * (g1 - g2).squaredNorm();
        }
        eta_sq[t1] += integral;
        eta_sq[t2] += integral;
    }

    ErrorIndicators ind;
    ind.eta.resize(mesh.num_elements());
    for (const Element& el : mesh.elements())
        ind.eta[el.id] = std::sqrt(mesh.element_diameter(el.id) * eta_sq[el.id]);
    ind.eta_max = ind.eta.size() > 0 ? ind.eta.maxCoeff() : 0.0;
    return ind;
}

std::unordered_set<int> mark(const ErrorIndicators& indicators, double theta) {
    if (indicators.eta.size() == 0) throw std::invalid_argument("mark: empty indicators");
    std::unordered_set<int> out;
    if (indicators.eta_max <= 0.0) return out;
    const double cut = theta * indicators.eta_max;
    for (Eigen::Index i = 0; i < indicators.eta.size(); ++i)
        if (indicators.eta[i] >= cut) out.insert(static_cast<int>(i));
    return out;
}

AdaptiveRun run_loop(const BenchmarkProblem& problem, const LoopConfig& config,
                     const IterationCallback& callback) {
    if (config.iterations < 1) throw std::invalid_argument("run_loop: iterations must be >= 1");
    const QuadratureRule rule = triangle_rule_degree4();

    AdaptiveRun run;
    Mesh mesh = problem.domain.make_mesh();

    for (int it = 0; it < config.iterations; ++it) {
        const auto t0 = std::chrono::steady_clock::now();

        const FESpace space = build_trial_space(mesh, config.degree);
        TestBasisOptions opts;
        opts.include_boundary = config.include_boundary;
        opts.include_bubbles = config.include_bubbles;
        const TestBasis basis = build_test_basis(mesh, opts);
        // The boundary flux term accompanies boundary test functions.
        const auto forms = assemble(space, basis, config.include_boundary);

        SdpProblem sdp = build_objective(space, rule, problem.objective);
        add_convexity_constraints(sdp, forms);
        for (const ConstraintSpec& c : problem.constraints)
            add_problem_constraints(sdp, space, rule, c);

        const ConeProgram cone = to_cone_program(sdp);
        const SolverResult solved = solve(cone, config.solver);
        const Eigen::VectorXd coeffs = solved.x.head(space.num_dofs());

        const ErrorIndicators indicators = estimate(mesh, space, coeffs);

        IterationRecord rec;
        rec.iteration = it;
        rec.elements = mesh.num_elements();
        rec.dofs = space.num_dofs();
        rec.status = solved.status;
        rec.objective = solved.primal_objective;
        rec.eta_max = indicators.eta_max;
        if (problem.has_exact()) {
            const ErrorReport err = error_norms(space, coeffs, problem.exact_solution);
            rec.l2_error = err.l2;
            rec.linf_error = err.linf;
        }
        rec.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        run.records.push_back(rec);

        if (callback) callback(rec, {mesh, space, coeffs, indicators, solved});

        if (solved.status != SolveStatus::optimal)
            throw AdaptiveRunFailure("solver returned " + to_string(solved.status) +
                                         " at iteration " + std::to_string(it),
                                     run);

        if (it + 1 == config.iterations) break;
        if (indicators.eta_max <= 0.0) {
            run.converged = true;
            break;
        }
        if (config.mode == LoopConfig::Mode::adaptive) {
            mesh = bisect(mesh, mark(indicators, config.theta));
        } else {
            mesh = bisect_all(bisect_all(mesh));
        }
    }
    return run;
}

}  // namespace fecvx
