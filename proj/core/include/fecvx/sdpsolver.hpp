#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <string>
#include <vector>

namespace fecvx {

/// Cone structure of the rows of G: `lp` nonnegative-orthant rows followed by
/// one scaled-vectorized (svec) slice of length m(m+1)/2 per PSD block.
struct ConeDims {
    int lp = 0;
    std::vector<int> psd;

    int svec_rows() const {
        int n = 0;
        for (int m : psd) n += m * (m + 1) / 2;
        return n;
    }
    int rows() const { return lp + svec_rows(); }
    /// Trace-based cone degree (number of "scalar" complementarity pairs).
    int degree() const {
        int d = lp;
        for (int m : psd) d += m;
        return d;
    }
};

/// Conic program in standard form:
///   minimize    c'x
///   subject to  A x = b,
///               G x + s = h,   s in K = R+^lp x PSD(m_1) x ... x PSD(m_k).
/// PSD slices of s and h use the svec convention (off-diagonals scaled by
/// sqrt(2)), so inner products are plain dot products.
struct ConeProgram {
    Eigen::VectorXd c;
    Eigen::SparseMatrix<double> A;
    Eigen::VectorXd b;
    Eigen::SparseMatrix<double> G;
    Eigen::VectorXd h;
    ConeDims dims;

    int num_vars() const { return static_cast<int>(c.size()); }
};

struct SolverConfig {
    double tol_primal = 1e-7;
    double tol_dual = 1e-7;
    double tol_gap = 1e-7;
    int max_iterations = 200;
    int verbosity = 0;
    double static_regularization = 1e-9;  // added to the KKT diagonal
    int refinement_steps = 1;
    double step_fraction = 0.99;
};

enum class SolveStatus { optimal, infeasible, unbounded, max_iter, numerical_failure };

std::string to_string(SolveStatus s);

struct Residuals {
    double primal = 0.0;   // max of ||Ax-b|| / (1+||b||), ||Gx+s-h|| / (1+||h||)
    double dual = 0.0;     // ||A'y + G'z + c|| / (1+||c||)
    double gap = 0.0;      // <s, z>
    double rel_gap = 0.0;  // gap / max(1, |primal objective|)
};

struct SolverResult {
    SolveStatus status = SolveStatus::numerical_failure;
    Eigen::VectorXd x;
    Eigen::VectorXd y;  // multipliers of A x = b
    Eigen::VectorXd z;  // cone multipliers (svec layout)
    Eigen::VectorXd s;  // cone slacks (svec layout)
    double primal_objective = 0.0;
    double dual_objective = 0.0;
    Residuals residuals;
    int iterations = 0;
    std::string message;
};

/// Primal-dual path-following interior-point solve with Nesterov-Todd scaling
/// and a homogeneous self-dual embedding for infeasibility detection. The
/// per-iteration Schur complement is factored with a sparse LDLT.
/// Deterministic: identical inputs and config give identical iterates.
SolverResult solve(const ConeProgram& program, const SolverConfig& config = {});

struct KktReport {
    Residuals residuals;
    double min_slack_eigenvalue = 0.0;  // most negative cone eigenvalue of s
    double min_dual_eigenvalue = 0.0;   // same for z
};

/// Recomputes all optimality residuals from scratch, independently of the
/// solver's internal bookkeeping. Throws if dual data is missing.
KktReport validate_kkt(const ConeProgram& program, const SolverResult& result);

// svec helpers (shared with the SDPA translation and tests)
int svec_size(int m);
Eigen::VectorXd svec(const Eigen::MatrixXd& M);
Eigen::MatrixXd smat(const Eigen::VectorXd& v, int m);

}  // namespace fecvx
