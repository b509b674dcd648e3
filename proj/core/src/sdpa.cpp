#include "fecvx/sdpa.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace fecvx {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// One nonzero of constraint matrix F_mat: block `blk`, upper-triangle (i,j).
struct Entry {
    int mat, blk, i, j;
    double value;
    bool operator<(const Entry& o) const {
        return std::tie(mat, blk, i, j) < std::tie(o.mat, o.blk, o.i, o.j);
    }
};

}  // namespace

void write_sdpa(const SdpProblem& problem, std::ostream& os) {
    const int m = problem.num_vars();

    // Linear rows: inequalities one row each, equalities expanded to a pair.
    int diag_rows = 0;
    for (const LinearConstraint& c : problem.linear)
        diag_rows += (c.kind == LinearConstraint::Kind::equality) ? 2 : 1;

    std::vector<Entry> entries;
    int blk_index = diag_rows > 0 ? 2 : 1;
    const int diag_blk = 1;

    int row = 1;
    for (const LinearConstraint& c : problem.linear) {
        // a.x <= r  becomes the diagonal entry  r - a.x >= 0
        for (const auto& [v, coef] : c.coeffs)
            if (coef != 0.0) entries.push_back({v + 1, diag_blk, row, row, -coef});
        if (c.rhs != 0.0) entries.push_back({0, diag_blk, row, row, -c.rhs});
        ++row;
        if (c.kind == LinearConstraint::Kind::equality) {
            for (const auto& [v, coef] : c.coeffs)
                if (coef != 0.0) entries.push_back({v + 1, diag_blk, row, row, coef});
            if (c.rhs != 0.0) entries.push_back({0, diag_blk, row, row, c.rhs});
            ++row;
        }
    }

    for (const PsdBlock& blk : problem.blocks) {
        int k = 0;
        for (int j = 0; j < blk.size; ++j)
            for (int i = j; i < blk.size; ++i, ++k) {
                const AffineExpr& e = blk.entries[k];
                // X_blk = sum x_i F_i - F_0 = B(x)  =>  F_0 = -B0, F_v = M_v
                if (e.constant != 0.0)
                    entries.push_back({0, blk_index, j + 1, i + 1, -e.constant});
                for (const auto& [v, coef] : e.coeffs)
                    if (coef != 0.0) entries.push_back({v + 1, blk_index, j + 1, i + 1, coef});
            }
        ++blk_index;
    }
    std::sort(entries.begin(), entries.end());

    os << "* fecvx sdp export\n";
    os << m << "\n";
    const int nblocks = (diag_rows > 0 ? 1 : 0) + static_cast<int>(problem.blocks.size());
    os << nblocks << "\n";
    bool first = true;
    if (diag_rows > 0) {
        os << -diag_rows;
        first = false;
    }
    for (const PsdBlock& blk : problem.blocks) {
        if (!first) os << " ";
        os << blk.size;
        first = false;
    }
    os << "\n";
    for (int v = 0; v < m; ++v) os << (v ? " " : "") << fmt(problem.objective[v]);
    os << "\n";
    for (const Entry& e : entries)
        os << e.mat << " " << e.blk << " " << e.i << " " << e.j << " " << fmt(e.value) << "\n";
}

void write_sdpa_file(const SdpProblem& problem, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    write_sdpa(problem, os);
}

namespace {

// SDPA block-structure lines may use commas, parentheses or braces.
std::vector<double> parse_numbers(const std::string& line) {
    std::string clean = line;
    for (char& ch : clean)
        if (ch == ',' || ch == '(' || ch == ')' || ch == '{' || ch == '}') ch = ' ';
    std::istringstream ls(clean);
    std::vector<double> out;
    double v;
    while (ls >> v) out.push_back(v);
    return out;
}

std::string next_data_line(std::istream& is) {
    std::string line;
    while (std::getline(is, line)) {
        std::size_t pos = line.find_first_not_of(" \t\r");
        if (pos == std::string::npos) continue;
        if (line[pos] == '*' || line[pos] == '"') continue;
        return line;
    }
    throw std::runtime_error("read_sdpa: unexpected end of file");
}

}  // namespace

SdpProblem read_sdpa(std::istream& is) {
    const auto nums_m = parse_numbers(next_data_line(is));
    if (nums_m.empty()) throw std::runtime_error("read_sdpa: missing variable count");
    const int m = static_cast<int>(nums_m[0]);
    const auto nums_nb = parse_numbers(next_data_line(is));
    if (nums_nb.empty()) throw std::runtime_error("read_sdpa: missing block count");
    const int nblocks = static_cast<int>(nums_nb[0]);

    std::vector<int> block_sizes;
    while (static_cast<int>(block_sizes.size()) < nblocks) {
        for (double v : parse_numbers(next_data_line(is)))
            block_sizes.push_back(static_cast<int>(v));
    }
    if (static_cast<int>(block_sizes.size()) != nblocks)
        throw std::runtime_error("read_sdpa: malformed block structure");

    std::vector<double> cost;
    while (static_cast<int>(cost.size()) < m) {
        for (double v : parse_numbers(next_data_line(is))) cost.push_back(v);
    }
    if (static_cast<int>(cost.size()) != m)
        throw std::runtime_error("read_sdpa: malformed objective");

    SdpProblem prob;
    prob.objective = cost;
    prob.num_u = m;

    // Diagonal blocks become per-position linear inequalities; PSD blocks map
    // back to PsdBlock. Track where each block's constraints start.
    struct BlockRef {
        bool diagonal;
        int first;  // index into prob.linear or prob.blocks
        int size;
    };
    std::vector<BlockRef> refs;
    for (int bsz : block_sizes) {
        BlockRef ref;
        ref.diagonal = bsz < 0 || bsz == 1;
        ref.size = std::abs(bsz);
        if (ref.diagonal) {
            ref.first = static_cast<int>(prob.linear.size());
            for (int d = 0; d < ref.size; ++d) {
                LinearConstraint c;
                c.kind = LinearConstraint::Kind::inequality_le;
                c.rhs = 0.0;
                prob.linear.push_back(std::move(c));
            }
        } else {
            ref.first = static_cast<int>(prob.blocks.size());
            prob.blocks.push_back(PsdBlock::make(ref.size));
        }
        refs.push_back(ref);
    }

    std::string line;
    while (std::getline(is, line)) {
        const auto nums = parse_numbers(line);
        if (nums.empty()) continue;
        if (nums.size() != 5) throw std::runtime_error("read_sdpa: malformed entry line");
        const int mat = static_cast<int>(nums[0]);
        const int blk = static_cast<int>(nums[1]);
        const int i = static_cast<int>(nums[2]);
        const int j = static_cast<int>(nums[3]);
        const double value = nums[4];
        if (mat < 0 || mat > m || blk < 1 || blk > nblocks)
            throw std::runtime_error("read_sdpa: entry indices out of range");
        const BlockRef& ref = refs[blk - 1];
        if (ref.diagonal) {
            if (i != j || i < 1 || i > ref.size)
                throw std::runtime_error("read_sdpa: bad diagonal entry");
            LinearConstraint& c = prob.linear[ref.first + i - 1];
            // diag position: sum x_v F_v[i] - F0[i] >= 0
            if (mat == 0)
                c.rhs = -value;
            else
                c.coeffs.emplace_back(mat - 1, -value);
        } else {
            if (i < 1 || j < 1 || i > ref.size || j > ref.size)
                throw std::runtime_error("read_sdpa: entry outside block");
            PsdBlock& b = prob.blocks[ref.first];
            AffineExpr& e = b.at(std::max(i, j) - 1, std::min(i, j) - 1);
            if (mat == 0)
                e.constant = -value;
            else
                e.coeffs.emplace_back(mat - 1, value);
        }
    }
    return prob;
}

SdpProblem read_sdpa_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    return read_sdpa(is);
}

}  // namespace fecvx
