#pragma once

// Test-only oracles, independent of the implementation paths they check.

#include "fecvx/sdpmodel.hpp"

#include <Eigen/Eigenvalues>

#include <functional>
#include <vector>

namespace fecvx::testing {

// Feasibility of x for an SdpProblem by direct eigenvalue checks.
inline bool is_feasible(const SdpProblem& prob, const Eigen::VectorXd& x, double tol) {
    for (const LinearConstraint& c : prob.linear) {
        double v = 0.0;
        for (const auto& [i, coef] : c.coeffs) v += coef * x[i];
        if (c.kind == LinearConstraint::Kind::equality) {
            if (std::abs(v - c.rhs) > tol) return false;
        } else if (v > c.rhs + tol) {
            return false;
        }
    }
    for (const PsdBlock& blk : prob.blocks) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(blk.eval(x), Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -tol) return false;
    }
    return true;
}

inline double objective_value(const SdpProblem& prob, const Eigen::VectorXd& x) {
    double v = 0.0;
    for (int i = 0; i < prob.num_vars(); ++i) v += prob.objective[i] * x[i];
    return v;
}

// Brute-force minimization over a box grid with a feasibility filter,
// recursively zoomed around the incumbent. Returns the best objective found.
inline double brute_force_min(const SdpProblem& prob, Eigen::VectorXd lo, Eigen::VectorXd hi,
                              int points_per_dim, int zoom_stages, double feas_tol,
                              Eigen::VectorXd* argmin = nullptr) {
    const int n = prob.num_vars();
    double best = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_x = 0.5 * (lo + hi);

    for (int stage = 0; stage < zoom_stages; ++stage) {
        std::vector<int> idx(n, 0);
        Eigen::VectorXd x(n);
        bool carry = false;
        while (!carry) {
            for (int i = 0; i < n; ++i)
                x[i] = lo[i] + (hi[i] - lo[i]) * idx[i] / (points_per_dim - 1);
            if (is_feasible(prob, x, feas_tol)) {
                const double v = objective_value(prob, x);
                if (v < best) {
                    best = v;
                    best_x = x;
                }
            }
            int d = 0;
            while (d < n && ++idx[d] == points_per_dim) {
                idx[d] = 0;
                ++d;
            }
            carry = d == n;
        }
        // zoom in around the incumbent
        const Eigen::VectorXd span = (hi - lo) / (points_per_dim - 1);
        for (int i = 0; i < n; ++i) {
            lo[i] = best_x[i] - 1.5 * span[i];
            hi[i] = best_x[i] + 1.5 * span[i];
        }
    }
    if (argmin) *argmin = best_x;
    return best;
}

}  // namespace fecvx::testing
