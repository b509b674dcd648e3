#include "fecvx/sdpsolver.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <sstream>
#include <cstdlib>

namespace fecvx {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
const double kSqrt2 = std::sqrt(2.0);
}  // namespace

std::string to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::optimal: return "optimal";
        case SolveStatus::infeasible: return "infeasible";
        case SolveStatus::unbounded: return "unbounded";
        case SolveStatus::max_iter: return "max_iter";
        case SolveStatus::numerical_failure: return "numerical_failure";
    }
    return "?";
}

int svec_size(int m) { return m * (m + 1) / 2; }

Eigen::VectorXd svec(const Eigen::MatrixXd& M) {
    const int m = static_cast<int>(M.rows());
    Eigen::VectorXd v(svec_size(m));
    int k = 0;
    for (int j = 0; j < m; ++j)
        for (int i = j; i < m; ++i) v[k++] = (i == j) ? M(i, j) : kSqrt2 * M(i, j);
    return v;
}

Eigen::MatrixXd smat(const Eigen::VectorXd& v, int m) {
    Eigen::MatrixXd M(m, m);
    int k = 0;
    for (int j = 0; j < m; ++j)
        for (int i = j; i < m; ++i) {
            const double val = (i == j) ? v[k] : v[k] / kSqrt2;
            M(i, j) = val;
            M(j, i) = val;
            ++k;
        }
    return M;
}

namespace {

struct BlockInfo {
    int offset;             // first row of this block in the cone layout
    int m;                  // matrix size
    int sd;                 // svec length
    std::vector<int> cols;  // union of variable indices touched by the block
    Eigen::MatrixXd Gk;     // dense sd x |cols| slice of G
};

struct SparseRow {
    std::vector<std::pair<int, double>> entries;
};

struct Layout {
    int n = 0;                      // variables
    int p = 0;                      // equality rows
    int cdim = 0;                   // cone rows
    std::vector<SparseRow> g_rows;  // row-major copy of G
    std::vector<BlockInfo> blocks;
};

Layout make_layout(const ConeProgram& prog) {
    Layout L;
    L.n = prog.num_vars();
    L.p = static_cast<int>(prog.A.rows());
    L.cdim = prog.dims.rows();

    L.g_rows.assign(L.cdim, {});
    for (int col = 0; col < prog.G.outerSize(); ++col)
        for (Eigen::SparseMatrix<double>::InnerIterator it(prog.G, col); it; ++it)
            L.g_rows[it.row()].entries.emplace_back(col, it.value());

    int offset = prog.dims.lp;
    for (int m : prog.dims.psd) {
        BlockInfo blk;
        blk.offset = offset;
        blk.m = m;
        blk.sd = svec_size(m);
        std::vector<int> cols;
        for (int r = 0; r < blk.sd; ++r)
            for (const auto& [col, val] : L.g_rows[offset + r].entries) cols.push_back(col);
        std::sort(cols.begin(), cols.end());
        cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
        blk.cols = cols;
        blk.Gk = Eigen::MatrixXd::Zero(blk.sd, static_cast<int>(cols.size()));
        for (int r = 0; r < blk.sd; ++r)
            for (const auto& [col, val] : L.g_rows[offset + r].entries) {
                const auto it = std::lower_bound(cols.begin(), cols.end(), col);
                blk.Gk(r, static_cast<int>(it - cols.begin())) = val;
            }
        offset += blk.sd;
        L.blocks.push_back(std::move(blk));
    }
    return L;
}

struct Scaling {
    Eigen::VectorXd lp_w2;     // s_i / z_i
    Eigen::VectorXd lp_w2inv;  // z_i / s_i
    Eigen::VectorXd lp_lambda;
    struct Block {
        Eigen::MatrixXd R, Rinv;
        Eigen::VectorXd lambda;
        Eigen::MatrixXd WtWinv;  // svec-space representation of (W'W)^{-1}
    };
    std::vector<Block> blocks;
    bool ok = false;
};

Scaling identity_scaling(const ConeDims& dims) {
    Scaling sc;
    sc.lp_w2 = Eigen::VectorXd::Ones(dims.lp);
    sc.lp_w2inv = Eigen::VectorXd::Ones(dims.lp);
    sc.lp_lambda = Eigen::VectorXd::Ones(dims.lp);
    for (int m : dims.psd) {
        Scaling::Block b;
        b.R = Eigen::MatrixXd::Identity(m, m);
        b.Rinv = b.R;
        b.lambda = Eigen::VectorXd::Ones(m);
        b.WtWinv = Eigen::MatrixXd::Identity(svec_size(m), svec_size(m));
        sc.blocks.push_back(std::move(b));
    }
    sc.ok = true;
    return sc;
}

// Nesterov-Todd scaling point of (s, z).
Scaling compute_scaling(const Layout& L, const ConeDims& dims, const Eigen::VectorXd& s,
                        const Eigen::VectorXd& z) {
    Scaling sc;
    sc.lp_w2.resize(dims.lp);
    sc.lp_w2inv.resize(dims.lp);
    sc.lp_lambda.resize(dims.lp);
    for (int i = 0; i < dims.lp; ++i) {
        if (s[i] <= 0.0 || z[i] <= 0.0) return sc;
        sc.lp_w2[i] = s[i] / z[i];
        sc.lp_w2inv[i] = z[i] / s[i];
        sc.lp_lambda[i] = std::sqrt(s[i] * z[i]);
    }
    for (const BlockInfo& blk : L.blocks) {
        const Eigen::MatrixXd S = smat(s.segment(blk.offset, blk.sd), blk.m);
        const Eigen::MatrixXd Z = smat(z.segment(blk.offset, blk.sd), blk.m);
        Eigen::LLT<Eigen::MatrixXd> llt_s(S), llt_z(Z);
        if (llt_s.info() != Eigen::Success || llt_z.info() != Eigen::Success) return sc;
        const Eigen::MatrixXd Ls = llt_s.matrixL();
        const Eigen::MatrixXd Lz = llt_z.matrixL();
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(Lz.transpose() * Ls,
                                              Eigen::ComputeFullU | Eigen::ComputeFullV);
        const Eigen::VectorXd sig = svd.singularValues();
        if (sig.minCoeff() <= 0.0) return sc;
        Scaling::Block b;
        const Eigen::VectorXd isqrt = sig.cwiseSqrt().cwiseInverse();
        b.R = Ls * svd.matrixV() * isqrt.asDiagonal();
        // R^{-1} = sqrt(Sigma) V' Ls^{-1}
        b.Rinv = sig.cwiseSqrt().asDiagonal() * svd.matrixV().transpose() *
                 Ls.triangularView<Eigen::Lower>().solve(
                     Eigen::MatrixXd::Identity(blk.m, blk.m));
        b.lambda = sig;
        const Eigen::MatrixXd Lam = b.R * b.R.transpose();
        Eigen::LLT<Eigen::MatrixXd> llt_lam(Lam);
        const Eigen::MatrixXd LamInv =
            llt_lam.solve(Eigen::MatrixXd::Identity(blk.m, blk.m));
        b.WtWinv.resize(blk.sd, blk.sd);
        Eigen::VectorXd unit = Eigen::VectorXd::Zero(blk.sd);
        for (int j = 0; j < blk.sd; ++j) {
            unit[j] = 1.0;
            b.WtWinv.col(j) = svec(LamInv * smat(unit, blk.m) * LamInv);
            unit[j] = 0.0;
        }
        sc.blocks.push_back(std::move(b));
    }
    sc.ok = true;
    return sc;
}

// (W'W)^{-1} v over the full cone layout.
Eigen::VectorXd wtw_inv_apply(const Layout& L, const ConeDims& dims, const Scaling& sc,
                              const Eigen::VectorXd& v) {
    Eigen::VectorXd out(v.size());
    out.head(dims.lp) = sc.lp_w2inv.cwiseProduct(v.head(dims.lp));
    for (std::size_t k = 0; k < L.blocks.size(); ++k) {
        const BlockInfo& blk = L.blocks[k];
        out.segment(blk.offset, blk.sd) =
            sc.blocks[k].WtWinv * v.segment(blk.offset, blk.sd);
    }
    return out;
}

// W'W v (used to recover ds from dz).
Eigen::VectorXd wtw_apply(const Layout& L, const ConeDims& dims, const Scaling& sc,
                          const Eigen::VectorXd& v) {
    Eigen::VectorXd out(v.size());
    out.head(dims.lp) = sc.lp_w2.cwiseProduct(v.head(dims.lp));
    for (std::size_t k = 0; k < L.blocks.size(); ++k) {
        const BlockInfo& blk = L.blocks[k];
        const Scaling::Block& b = sc.blocks[k];
        const Eigen::MatrixXd M = smat(v.segment(blk.offset, blk.sd), blk.m);
        const Eigen::MatrixXd Lam = b.R * b.R.transpose();
        out.segment(blk.offset, blk.sd) = svec(Lam * M * Lam);
    }
    return out;
}

// W' v: adjoint of the scaling map (R M R' per block, sqrt(w2) on LP rows).
Eigen::VectorXd wt_apply(const Layout& L, const ConeDims& dims, const Scaling& sc,
                         const Eigen::VectorXd& v) {
    Eigen::VectorXd out(v.size());
    out.head(dims.lp) = sc.lp_w2.cwiseSqrt().cwiseProduct(v.head(dims.lp));
    for (std::size_t k = 0; k < L.blocks.size(); ++k) {
        const BlockInfo& blk = L.blocks[k];
        const Scaling::Block& b = sc.blocks[k];
        const Eigen::MatrixXd M = smat(v.segment(blk.offset, blk.sd), blk.m);
        out.segment(blk.offset, blk.sd) = svec(b.R * M * b.R.transpose());
    }
    return out;
}

// Scaled primal direction W^{-T} v = Rinv M Rinv' per block.
Eigen::VectorXd wmt_apply(const Layout& L, const ConeDims& dims, const Scaling& sc,
                          const Eigen::VectorXd& v) {
    Eigen::VectorXd out(v.size());
    out.head(dims.lp) = sc.lp_w2.cwiseSqrt().cwiseInverse().cwiseProduct(v.head(dims.lp));
    for (std::size_t k = 0; k < L.blocks.size(); ++k) {
        const BlockInfo& blk = L.blocks[k];
        const Scaling::Block& b = sc.blocks[k];
        const Eigen::MatrixXd M = smat(v.segment(blk.offset, blk.sd), blk.m);
        out.segment(blk.offset, blk.sd) = svec(b.Rinv * M * b.Rinv.transpose());
    }
    return out;
}

// Scaled dual direction W v = R' M R per block.
Eigen::VectorXd w_apply(const Layout& L, const ConeDims& dims, const Scaling& sc,
                        const Eigen::VectorXd& v) {
    Eigen::VectorXd out(v.size());
    out.head(dims.lp) = sc.lp_w2.cwiseSqrt().cwiseProduct(v.head(dims.lp));
    for (std::size_t k = 0; k < L.blocks.size(); ++k) {
        const BlockInfo& blk = L.blocks[k];
        const Scaling::Block& b = sc.blocks[k];
        const Eigen::MatrixXd M = smat(v.segment(blk.offset, blk.sd), blk.m);
        out.segment(blk.offset, blk.sd) = svec(b.R.transpose() * M * b.R);
    }
    return out;
}

Eigen::VectorXd cone_identity(const ConeDims& dims) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(dims.rows());
    e.head(dims.lp).setOnes();
    int off = dims.lp;
    for (int m : dims.psd) {
        e.segment(off, svec_size(m)) = svec(Eigen::MatrixXd::Identity(m, m));
        off += svec_size(m);
    }
    return e;
}

// Most negative cone eigenvalue of v (0 if v is in the cone's interior).
double min_cone_eigenvalue(const Layout& L, const ConeDims& dims, const Eigen::VectorXd& v) {
    double mn = kInf;
    for (int i = 0; i < dims.lp; ++i) mn = std::min(mn, v[i]);
    for (const BlockInfo& blk : L.blocks) {
        const Eigen::MatrixXd M = smat(v.segment(blk.offset, blk.sd), blk.m);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
        mn = std::min(mn, es.eigenvalues().minCoeff());
    }
    return (mn == kInf) ? 0.0 : mn;
}

// Largest t with v + t*dv staying in the cone (+inf if unbounded).
double max_step(const Layout& L, const ConeDims& dims, const Eigen::VectorXd& v,
                const Eigen::VectorXd& dv) {
    double amax = kInf;
    for (int i = 0; i < dims.lp; ++i)
        if (dv[i] < 0.0) amax = std::min(amax, -v[i] / dv[i]);
    for (const BlockInfo& blk : L.blocks) {
        const Eigen::MatrixXd V = smat(v.segment(blk.offset, blk.sd), blk.m);
        const Eigen::MatrixXd D = smat(dv.segment(blk.offset, blk.sd), blk.m);
        Eigen::LLT<Eigen::MatrixXd> llt(V);
        if (llt.info() != Eigen::Success) return 0.0;
        const Eigen::MatrixXd Lv = llt.matrixL();
        const Eigen::MatrixXd M =
            Lv.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd(
                Lv.triangularView<Eigen::Lower>().solve(D).transpose()));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
        const double mn = es.eigenvalues().minCoeff();
        if (mn < 0.0) amax = std::min(amax, -1.0 / mn);
    }
    return amax;
}

// lambda o lambda (squared scaled point) in svec layout.
Eigen::VectorXd lambda_square(const Layout& L, const ConeDims& dims, const Scaling& sc) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(dims.rows());
    out.head(dims.lp) = sc.lp_lambda.cwiseProduct(sc.lp_lambda);
    for (std::size_t k = 0; k < L.blocks.size(); ++k) {
        const BlockInfo& blk = L.blocks[k];
        out.segment(blk.offset, blk.sd) =
            svec(sc.blocks[k].lambda.cwiseProduct(sc.blocks[k].lambda).asDiagonal());
    }
    return out;
}

// Solves lambda o x = d for x (lambda diagonal in the scaled space).
Eigen::VectorXd lambda_divide(const Layout& L, const ConeDims& dims, const Scaling& sc,
                              const Eigen::VectorXd& d) {
    Eigen::VectorXd out(d.size());
    out.head(dims.lp) = d.head(dims.lp).cwiseQuotient(sc.lp_lambda);
    for (std::size_t k = 0; k < L.blocks.size(); ++k) {
        const BlockInfo& blk = L.blocks[k];
        const Eigen::VectorXd& lam = sc.blocks[k].lambda;
        Eigen::MatrixXd M = smat(d.segment(blk.offset, blk.sd), blk.m);
        for (int i = 0; i < blk.m; ++i)
            for (int j = 0; j < blk.m; ++j) M(i, j) *= 2.0 / (lam[i] + lam[j]);
        out.segment(blk.offset, blk.sd) = svec(M);
    }
    return out;
}

// Jordan product a o b (symmetrized matrix product on PSD blocks).
Eigen::VectorXd jordan_product(const Layout& L, const ConeDims& dims, const Eigen::VectorXd& a,
                               const Eigen::VectorXd& b) {
    Eigen::VectorXd out(a.size());
    out.head(dims.lp) = a.head(dims.lp).cwiseProduct(b.head(dims.lp));
    for (const BlockInfo& blk : L.blocks) {
        const Eigen::MatrixXd A = smat(a.segment(blk.offset, blk.sd), blk.m);
        const Eigen::MatrixXd B = smat(b.segment(blk.offset, blk.sd), blk.m);
        out.segment(blk.offset, blk.sd) = svec(0.5 * (A * B + B * A));
    }
    return out;
}

class KktSolver {
  public:
    KktSolver(const ConeProgram& prog, const Layout& layout, double reg, int refinement)
        : prog_(prog), L_(layout), reg_(reg), refinement_(refinement) {}

    bool factor(const Scaling& sc) {
        sc_ = &sc;
        const int n = L_.n, p = L_.p;
        std::vector<Eigen::Triplet<double>> trips;

        // H = G' (W'W)^{-1} G, assembled blockwise.
        for (int i = 0; i < prog_.dims.lp; ++i) {
            const auto& row = L_.g_rows[i].entries;
            const double w = sc.lp_w2inv[i];
            for (const auto& [c1, v1] : row)
                for (const auto& [c2, v2] : row) trips.emplace_back(c1, c2, w * v1 * v2);
        }
        for (std::size_t k = 0; k < L_.blocks.size(); ++k) {
            const BlockInfo& blk = L_.blocks[k];
            const Eigen::MatrixXd Hloc =
                blk.Gk.transpose() * sc.blocks[k].WtWinv * blk.Gk;
            const int nc = static_cast<int>(blk.cols.size());
            for (int a = 0; a < nc; ++a)
                for (int b = 0; b < nc; ++b)
                    trips.emplace_back(blk.cols[a], blk.cols[b], Hloc(a, b));
        }
        H_.resize(n, n);
        H_.setFromTriplets(trips.begin(), trips.end());
        if (std::getenv("FECVX_DEBUG_KKT")) {
            std::printf("factor: %zu H-triplets, H norm %.3e, blocks %zu, lp %d\n",
                        trips.size(), H_.norm(), L_.blocks.size(), prog_.dims.lp);
        }

        // K = [H + reg*I, A'; A, -reg*I]
        for (int i = 0; i < n; ++i) trips.emplace_back(i, i, reg_);
        for (int col = 0; col < prog_.A.outerSize(); ++col)
            for (Eigen::SparseMatrix<double>::InnerIterator it(prog_.A, col); it; ++it) {
                trips.emplace_back(n + static_cast<int>(it.row()), static_cast<int>(it.col()),
                                   it.value());
                trips.emplace_back(static_cast<int>(it.col()), n + static_cast<int>(it.row()),
                                   it.value());
            }
        for (int i = 0; i < p; ++i) trips.emplace_back(n + i, n + i, -reg_);

        Eigen::SparseMatrix<double> K(n + p, n + p);
        K.setFromTriplets(trips.begin(), trips.end());
        if (!analyzed_) {
            ldlt_.analyzePattern(K);
            analyzed_ = true;
        }
        ldlt_.factorize(K);
        return ldlt_.info() == Eigen::Success;
    }

    // Solves [H A'; A 0] [x; y] = [rx; ry] with iterative refinement against
    // the unregularized matrix.
    bool solve_reduced(const Eigen::VectorXd& rx, const Eigen::VectorXd& ry, Eigen::VectorXd& x,
                       Eigen::VectorXd& y) const {
        const int n = L_.n, p = L_.p;
        Eigen::VectorXd rhs(n + p);
        rhs.head(n) = rx;
        rhs.tail(p) = ry;
        Eigen::VectorXd sol = ldlt_.solve(rhs);
        for (int it = 0; it < refinement_; ++it) {
            Eigen::VectorXd res(n + p);
            res.head(n) = rx - H_ * sol.head(n);
            if (p > 0) {
                res.head(n) -= prog_.A.transpose() * sol.tail(p);
                res.tail(p) = ry - prog_.A * sol.head(n);
            }
            sol += ldlt_.solve(res);
        }
        if (!sol.allFinite()) return false;
        x = sol.head(n);
        y = sol.tail(p);
        return true;
    }

    // Solves the 3x3 system
    //   [0 A' G'; A 0 0; G 0 -W'W] (x, y, z) = (px, py, pz).
    bool solve3(const Eigen::VectorXd& px, const Eigen::VectorXd& py, const Eigen::VectorXd& pz,
                Eigen::VectorXd& x, Eigen::VectorXd& y, Eigen::VectorXd& z) const {
        const Eigen::VectorXd tmp = wtw_inv_apply(L_, prog_.dims, *sc_, pz);
        const Eigen::VectorXd rx = px + prog_.G.transpose() * tmp;
        if (!solve_reduced(rx, py, x, y)) return false;
        z = wtw_inv_apply(L_, prog_.dims, *sc_, Eigen::VectorXd(prog_.G * x - pz));
        return true;
    }

  private:
    const ConeProgram& prog_;
    const Layout& L_;
    double reg_;
    int refinement_;
    const Scaling* sc_ = nullptr;
    Eigen::SparseMatrix<double> H_;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
    bool analyzed_ = false;
};

struct PresolvedA {
    Eigen::SparseMatrix<double> A;
    Eigen::VectorXd b;
    std::vector<int> kept_rows;
    bool inconsistent = false;
};

// Removes zero and linearly dependent equality rows (rank-revealing QR on A').
PresolvedA presolve_equalities(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& b) {
    PresolvedA out;
    const int p = static_cast<int>(A.rows());
    const int n = static_cast<int>(A.cols());
    if (p == 0) {
        out.A = A;
        out.b = b;
        return out;
    }
    std::vector<std::vector<std::pair<int, double>>> rows(p);
    for (int col = 0; col < A.outerSize(); ++col)
        for (Eigen::SparseMatrix<double>::InnerIterator it(A, col); it; ++it)
            rows[it.row()].emplace_back(col, it.value());

    std::vector<int> nonzero;
    for (int i = 0; i < p; ++i) {
        double norm = 0.0;
        for (const auto& [c, v] : rows[i]) norm += v * v;
        if (norm > 0.0)
            nonzero.push_back(i);
        else if (std::abs(b[i]) > 1e-12)
            out.inconsistent = true;
    }

    Eigen::MatrixXd At = Eigen::MatrixXd::Zero(n, static_cast<int>(nonzero.size()));
    for (std::size_t j = 0; j < nonzero.size(); ++j)
        for (const auto& [c, v] : rows[nonzero[j]]) At(c, static_cast<int>(j)) = v;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(At);
    const double thresh = 1e-12 * std::max(1.0, At.norm());
    const int rank = static_cast<int>((qr.matrixR()
                                           .diagonal()
                                           .head(std::min<Eigen::Index>(At.rows(), At.cols()))
                                           .cwiseAbs()
                                           .array() > thresh)
                                          .count());
    std::vector<int> keep;
    for (int k = 0; k < rank; ++k)
        keep.push_back(nonzero[qr.colsPermutation().indices()[k]]);
    std::sort(keep.begin(), keep.end());

    // Consistency of the dropped rows is checked against a least-squares
    // solution of the kept system.
    if (static_cast<int>(keep.size()) < static_cast<int>(nonzero.size())) {
        Eigen::MatrixXd Ak = Eigen::MatrixXd::Zero(static_cast<int>(keep.size()), n);
        Eigen::VectorXd bk(static_cast<int>(keep.size()));
        for (std::size_t i = 0; i < keep.size(); ++i) {
            for (const auto& [c, v] : rows[keep[i]]) Ak(static_cast<int>(i), c) = v;
            bk[static_cast<int>(i)] = b[keep[i]];
        }
        const Eigen::VectorXd x0 = Ak.colPivHouseholderQr().solve(bk);
        for (int i : nonzero) {
            if (std::binary_search(keep.begin(), keep.end(), i)) continue;
            double dot = 0.0, norm = 0.0;
            for (const auto& [c, v] : rows[i]) {
                dot += v * x0[c];
                norm += v * v;
            }
            if (std::abs(dot - b[i]) > 1e-8 * std::max(1.0, std::sqrt(norm)))
                out.inconsistent = true;
        }
    }

    out.kept_rows = keep;
    std::vector<Eigen::Triplet<double>> trips;
    out.b.resize(static_cast<int>(keep.size()));
    for (std::size_t i = 0; i < keep.size(); ++i) {
        for (const auto& [c, v] : rows[keep[i]]) trips.emplace_back(static_cast<int>(i), c, v);
        out.b[static_cast<int>(i)] = b[keep[i]];
    }
    out.A.resize(static_cast<int>(keep.size()), n);
    out.A.setFromTriplets(trips.begin(), trips.end());
    return out;
}

}  // namespace

SolverResult solve(const ConeProgram& program, const SolverConfig& config) {
    SolverResult res;
    const int n = program.num_vars();
    const ConeDims& dims = program.dims;
    const int cdim = dims.rows();

    if (program.G.rows() != cdim || program.G.cols() != n || program.h.size() != cdim ||
        program.A.cols() != n || program.A.rows() != program.b.size())
        throw std::invalid_argument("solve: inconsistent program dimensions");

    if (cdim == 0 && program.A.rows() == 0) {
        res.x = Eigen::VectorXd::Zero(n);
        res.y.resize(0);
        res.z.resize(0);
        res.s.resize(0);
        if (program.c.norm() == 0.0) {
            res.status = SolveStatus::optimal;
        } else {
            res.status = SolveStatus::unbounded;
            res.x = -program.c;
        }
        return res;
    }

    const PresolvedA pre = presolve_equalities(program.A, program.b);
    if (pre.inconsistent) {
        res.status = SolveStatus::infeasible;
        res.message = "inconsistent equality constraints removed in presolve";
        res.x = Eigen::VectorXd::Zero(n);
        res.y = Eigen::VectorXd::Zero(program.A.rows());
        res.z = Eigen::VectorXd::Zero(cdim);
        res.s = Eigen::VectorXd::Zero(cdim);
        return res;
    }

    ConeProgram prog;
    prog.c = program.c;
    prog.A = pre.A;
    prog.b = pre.b;
    prog.G = program.G;
    prog.h = program.h;
    prog.dims = dims;

    const Layout L = make_layout(prog);
    const int p = L.p;
    KktSolver kkt(prog, L, config.static_regularization, config.refinement_steps);

    const Eigen::VectorXd e = cone_identity(dims);
    const double resx0 = std::max(1.0, prog.c.norm());
    const double resy0 = std::max(1.0, prog.b.norm());
    const double resz0 = std::max(1.0, prog.h.norm());

    const auto scatter_y = [&](const Eigen::VectorXd& y) {
        Eigen::VectorXd out = Eigen::VectorXd::Zero(program.A.rows());
        for (std::size_t i = 0; i < pre.kept_rows.size(); ++i)
            out[pre.kept_rows[i]] = y[static_cast<int>(i)];
        return out;
    };

    const auto fail = [&](const std::string& why) {
        res.status = SolveStatus::numerical_failure;
        res.message = why;
        return res;
    };

    // Initialization at the identity scaling (cold start a la conelp).
    Eigen::VectorXd x(n), y(p), z(cdim), s(cdim);
    {
        const Scaling sc0 = identity_scaling(dims);
        if (!kkt.factor(sc0)) return fail("initial KKT factorization failed");
        Eigen::VectorXd xp, yp, zp;
        if (!kkt.solve3(Eigen::VectorXd::Zero(n), prog.b, prog.h, xp, yp, zp))
            return fail("initial primal solve failed");
        x = xp;
        s = -zp;
        const double ts = -min_cone_eigenvalue(L, dims, s);
        if (ts >= -1e-8 * std::max(1.0, s.norm())) s += (1.0 + ts) * e;

        Eigen::VectorXd xd, yd, zd;
        if (!kkt.solve3(Eigen::VectorXd(-prog.c), Eigen::VectorXd::Zero(p),
                        Eigen::VectorXd::Zero(cdim), xd, yd, zd))
            return fail("initial dual solve failed");
        y = yd;
        z = zd;
        const double tz = -min_cone_eigenvalue(L, dims, z);
        if (tz >= -1e-8 * std::max(1.0, z.norm())) z += (1.0 + tz) * e;
    }
    double tau = 1.0, kappa = 1.0;
    const int cone_degree = dims.degree() + 1;
    if (config.verbosity > 1) {
        std::printf("init x: %s\n", (std::stringstream() << x.transpose()).str().c_str());
        std::printf("init s: %s\n", (std::stringstream() << s.transpose()).str().c_str());
        std::printf("init z: %s\n", (std::stringstream() << z.transpose()).str().c_str());
    }

    const auto finalize = [&](SolveStatus status, const std::string& msg) {
        res.status = status;
        res.message = msg;
        res.x = x / tau;
        res.y = scatter_y(y / tau);
        res.z = z / tau;
        res.s = s / tau;
        res.primal_objective = prog.c.dot(res.x);
        res.dual_objective = -(prog.b.dot(y) + prog.h.dot(z)) / tau;
        res.residuals.primal = std::max(
            (prog.A * res.x - prog.b).norm() / (1.0 + prog.b.norm()),
            (prog.G * res.x + res.s - prog.h).norm() / (1.0 + prog.h.norm()));
        res.residuals.dual =
            (prog.A.transpose() * (y / tau) + prog.G.transpose() * res.z + prog.c).norm() /
            (1.0 + prog.c.norm());
        res.residuals.gap = res.s.dot(res.z);
        res.residuals.rel_gap =
            res.residuals.gap / std::max(1.0, std::abs(res.primal_objective));
        return res;
    };

    for (int iter = 0; iter < config.max_iterations; ++iter) {
        res.iterations = iter;

        // Residuals of the homogeneous embedding.
        const Eigen::VectorXd rx = prog.A.transpose() * y + prog.G.transpose() * z + prog.c * tau;
        const Eigen::VectorXd ry = prog.A * x - prog.b * tau;
        const Eigen::VectorXd rz = prog.G * x + s - prog.h * tau;
        const double rtau = prog.c.dot(x) + prog.b.dot(y) + prog.h.dot(z) + kappa;

        const double pcost = prog.c.dot(x) / tau;
        const double dcost = -(prog.b.dot(y) + prog.h.dot(z)) / tau;
        const double gap = s.dot(z) / (tau * tau);
        const double relgap = gap / std::max(1.0, std::abs(pcost));
        const double pres =
            std::max((ry / tau).norm() / resy0, (rz / tau).norm() / resz0);
        const double dres = (rx / tau).norm() / resx0;

        if (config.verbosity > 0) {
            std::printf("it %3d  pcost % .6e  dcost % .6e  gap %.2e  pres %.2e  dres %.2e\n",
                        iter, pcost, dcost, gap, pres, dres);
        }

        if (pres <= config.tol_primal && dres <= config.tol_dual &&
            (relgap <= config.tol_gap || gap <= config.tol_gap))
            return finalize(SolveStatus::optimal, "");

        // Certificates of primal / dual infeasibility.
        const double by_hz = -(prog.b.dot(y) + prog.h.dot(z));
        if (by_hz > 0.0) {
            const double cert =
                (prog.A.transpose() * y + prog.G.transpose() * z).norm() / resx0 / by_hz;
            if (cert <= config.tol_primal && tau <= 1e-6 * std::max(1.0, kappa)) {
                y /= by_hz;
                z /= by_hz;
                res.status = SolveStatus::infeasible;
                res.message = "primal infeasibility certificate found";
                res.x = Eigen::VectorXd::Zero(n);
                res.y = scatter_y(y);
                res.z = z;
                res.s = Eigen::VectorXd::Zero(cdim);
                res.residuals.primal = cert;
                return res;
            }
        }
        const double neg_cx = -prog.c.dot(x);
        if (neg_cx > 0.0) {
            const double cert = std::max((prog.A * x).norm() / resy0,
                                         (prog.G * x + s).norm() / resz0) /
                                neg_cx;
            if (cert <= config.tol_dual && tau <= 1e-6 * std::max(1.0, kappa)) {
                res.status = SolveStatus::unbounded;
                res.message = "dual infeasibility certificate found";
                res.x = x / neg_cx;
                res.y = scatter_y(Eigen::VectorXd::Zero(p));
                res.z = Eigen::VectorXd::Zero(cdim);
                res.s = s / neg_cx;
                res.residuals.dual = cert;
                return res;
            }
        }

        const Scaling sc = compute_scaling(L, dims, s, z);
        if (!sc.ok) return finalize(SolveStatus::numerical_failure, "scaling breakdown");
        if (!kkt.factor(sc))
            return finalize(SolveStatus::numerical_failure, "KKT factorization failed");

        const double mu = (s.dot(z) + tau * kappa) / cone_degree;

        // Direction for the homogeneous rhs (c, b, h), reused for both passes.
        Eigen::VectorXd vx, vy, vz;
        if (!kkt.solve3(Eigen::VectorXd(-prog.c), prog.b, prog.h, vx, vy, vz))
            return finalize(SolveStatus::numerical_failure, "KKT solve failed");

        const Eigen::VectorXd lmbda_sq = lambda_square(L, dims, sc);

        Eigen::VectorXd dx, dy, dz, ds;
        double dtau = 0.0, dkappa = 0.0;
        double sigma = 0.0;
        Eigen::VectorXd ds_aff_scaled, dz_aff_scaled;
        double dtau_aff = 0.0, dkappa_aff = 0.0;

        for (int pass = 0; pass < 2; ++pass) {
            Eigen::VectorXd d_s;  // complementarity rhs in the scaled space
            double b_kappa;
            if (pass == 0) {
                d_s = -lmbda_sq;
                b_kappa = -tau * kappa;
            } else {
                d_s = -lmbda_sq -
                      jordan_product(L, dims, ds_aff_scaled, dz_aff_scaled) +
                      sigma * mu * e;
                b_kappa = -tau * kappa - dtau_aff * dkappa_aff + sigma * mu;
            }
            const Eigen::VectorXd bs = lambda_divide(L, dims, sc, d_s);
            const Eigen::VectorXd bz_tilde = -rz - wt_apply(L, dims, sc, bs);

            Eigen::VectorXd ux, uy, uz;
            if (!kkt.solve3(Eigen::VectorXd(-rx), Eigen::VectorXd(-ry), bz_tilde, ux, uy, uz))
                return finalize(SolveStatus::numerical_failure, "KKT solve failed");

            const double denom =
                prog.c.dot(vx) + prog.b.dot(vy) + prog.h.dot(vz) - kappa / tau;
            if (std::abs(denom) < 1e-300)
                return finalize(SolveStatus::numerical_failure, "singular tau equation");
            const double num =
                -rtau - b_kappa / tau - (prog.c.dot(ux) + prog.b.dot(uy) + prog.h.dot(uz));
            const double dt = num / denom;

            dx = ux + dt * vx;
            dy = uy + dt * vy;
            dz = uz + dt * vz;
            dtau = dt;
            ds = wt_apply(L, dims, sc, bs) - wtw_apply(L, dims, sc, dz);
            dkappa = (b_kappa - kappa * dt) / tau;

            double amax = std::min(max_step(L, dims, s, ds), max_step(L, dims, z, dz));
            if (dtau < 0.0) amax = std::min(amax, -tau / dtau);
            if (dkappa < 0.0) amax = std::min(amax, -kappa / dkappa);

            if (pass == 0) {
                const double alpha_aff = std::min(1.0, amax);
                sigma = std::pow(1.0 - alpha_aff, 3);
                ds_aff_scaled = wmt_apply(L, dims, sc, ds);
                dz_aff_scaled = w_apply(L, dims, sc, dz);
                dtau_aff = dtau;
                dkappa_aff = dkappa;
            } else {
                const double alpha = std::min(1.0, config.step_fraction * amax);
                if (!(alpha > 1e-13))
                    return finalize(SolveStatus::numerical_failure, "step length collapsed");
                x += alpha * dx;
                y += alpha * dy;
                z += alpha * dz;
                s += alpha * ds;
                tau += alpha * dtau;
                kappa += alpha * dkappa;
                if (!(tau > 1e-300) || !x.allFinite() || !s.allFinite() || !z.allFinite())
                    return finalize(SolveStatus::numerical_failure, "iterate diverged");
            }
        }
    }
    res.iterations = config.max_iterations;
    return finalize(SolveStatus::max_iter, "iteration limit reached");
}

KktReport validate_kkt(const ConeProgram& program, const SolverResult& result) {
    if (result.y.size() != program.A.rows() || result.z.size() != program.dims.rows())
        throw std::invalid_argument("validate_kkt: result is missing dual data");
    if (result.x.size() != program.num_vars() || result.s.size() != program.dims.rows())
        throw std::invalid_argument("validate_kkt: result is missing primal data");

    const Layout L = make_layout(program);
    KktReport rep;

    // All residuals recomputed with plain loops, independent of the solver.
    const int n = program.num_vars();
    Eigen::VectorXd Ax = Eigen::VectorXd::Zero(program.A.rows());
    Eigen::VectorXd Gx = Eigen::VectorXd::Zero(program.dims.rows());
    Eigen::VectorXd Aty = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd Gtz = Eigen::VectorXd::Zero(n);
    for (int col = 0; col < program.A.outerSize(); ++col)
        for (Eigen::SparseMatrix<double>::InnerIterator it(program.A, col); it; ++it) {
            Ax[it.row()] += it.value() * result.x[it.col()];
            Aty[it.col()] += it.value() * result.y[it.row()];
        }
    for (int col = 0; col < program.G.outerSize(); ++col)
        for (Eigen::SparseMatrix<double>::InnerIterator it(program.G, col); it; ++it) {
            Gx[it.row()] += it.value() * result.x[it.col()];
            Gtz[it.col()] += it.value() * result.z[it.row()];
        }

    rep.residuals.primal =
        std::max((Ax - program.b).norm() / (1.0 + program.b.norm()),
                 (Gx + result.s - program.h).norm() / (1.0 + program.h.norm()));
    rep.residuals.dual = (Aty + Gtz + program.c).norm() / (1.0 + program.c.norm());
    rep.residuals.gap = result.s.dot(result.z);
    rep.residuals.rel_gap =
        rep.residuals.gap / std::max(1.0, std::abs(program.c.dot(result.x)));
    rep.min_slack_eigenvalue = min_cone_eigenvalue(L, program.dims, result.s);
    rep.min_dual_eigenvalue = min_cone_eigenvalue(L, program.dims, result.z);
    return rep;
}

}  // namespace fecvx
