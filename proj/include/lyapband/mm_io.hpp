#pragma once

#include <iosfwd>
#include <string>

#include "lyapband/banded_matrix.hpp"

namespace lyapband {

/// Matrix Market coordinate files, real field, 1-based indices.
/// A "symmetric" file stores the lower triangle and is expanded on read.
BandedMatrix read_matrix_market(std::istream& in);
BandedMatrix read_matrix_market(const std::string& path);

/// Writes with 17 significant digits so a read reproduces values bit-exactly.
/// Matrices flagged symmetric are written as "symmetric" (lower triangle).
void write_matrix_market(std::ostream& out, const BandedMatrix& x);
void write_matrix_market(const std::string& path, const BandedMatrix& x);

/// 0/1 matrix of a pattern (all structural entries set to 1).
void write_pattern_market(const std::string& path, const SparsityPattern& s);

}  // namespace lyapband
