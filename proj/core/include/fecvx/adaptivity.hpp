#pragma once

#include "fecvx/problems.hpp"

#include <functional>
#include <optional>
#include <stdexcept>
#include <unordered_set>

namespace fecvx {

struct ErrorIndicators {
    Eigen::VectorXd eta;  // one nonnegative value per element
    double eta_max = 0.0;
};

/// Jump-residual indicator eta_T^2 = h_T * sum over interior edges of T of
/// the integrated squared gradient jump; boundary edges contribute zero, and
/// the full jump is attributed to both adjacent elements.
ErrorIndicators estimate(const Mesh& mesh, const FESpace& space, const Eigen::VectorXd& coeffs);

/// Maximum marking: every element with eta_T >= theta * eta_max.
std::unordered_set<int> mark(const ErrorIndicators& indicators, double theta = 0.7);

struct LoopConfig {
    enum class Mode { uniform, adaptive };
    Mode mode = Mode::adaptive;
    int degree = 2;
    int iterations = 7;
    double theta = 0.7;
    bool include_boundary = true;        // boundary test functions in W_h
    bool include_bubbles = true;         // edge bubbles in W_h
    SolverConfig solver;
};

struct IterationRecord {
    int iteration = 0;
    int elements = 0;
    int dofs = 0;
    SolveStatus status = SolveStatus::numerical_failure;
    double objective = 0.0;
    double wall_seconds = 0.0;
    double eta_max = 0.0;
    std::optional<double> l2_error, linf_error;
};

struct AdaptiveRun {
    std::vector<IterationRecord> records;
    bool converged = false;  // the estimator vanished before the last iteration
};

/// Full per-iteration state handed to the callback (valid during the call).
struct IterationState {
    const Mesh& mesh;
    const FESpace& space;
    const Eigen::VectorXd& coeffs;
    const ErrorIndicators& indicators;
    const SolverResult& solver;
};

using IterationCallback = std::function<void(const IterationRecord&, const IterationState&)>;

/// Solver failure inside the loop; carries the iterations completed so far.
struct AdaptiveRunFailure : std::runtime_error {
    AdaptiveRunFailure(const std::string& what, AdaptiveRun run)
        : std::runtime_error(what), partial(std::move(run)) {}
    AdaptiveRun partial;
};

/// The solve -> estimate -> mark -> refine loop. Re-assembles spaces,
/// Hessian forms and the SDP on every iteration. Uniform mode quadruples the
/// element count per iteration (two bisection sweeps), matching the classic
/// uniform-refinement ladders. Stops early with `converged` if the estimator
/// vanishes.
AdaptiveRun run_loop(const BenchmarkProblem& problem, const LoopConfig& config,
                     const IterationCallback& callback = {});

}  // namespace fecvx
