#pragma once

#include "fecvx/sdpmodel.hpp"

#include <iosfwd>
#include <string>

namespace fecvx {

/// Writes the problem in SDPA sparse format (.dat-s):
///   min c.x  s.t.  X = sum_i x_i F_i - F_0 >= 0.
/// Equalities are expanded into inequality pairs; all linear rows form one
/// leading diagonal block, followed by the PSD blocks in order. Entries are
/// emitted in canonical (matrix, block, i, j) order so that
/// export -> parse -> export is byte-identical.
void write_sdpa(const SdpProblem& problem, std::ostream& os);
void write_sdpa_file(const SdpProblem& problem, const std::string& path);

/// Parses SDPA sparse format. Diagonal-block positions are mapped back to
/// linear inequalities, other blocks to PsdBlock constraints.
SdpProblem read_sdpa(std::istream& is);
SdpProblem read_sdpa_file(const std::string& path);

}  // namespace fecvx
