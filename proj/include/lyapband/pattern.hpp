#pragma once

#include <optional>

#include "lyapband/banded_matrix.hpp"

namespace lyapband {

/// {(i,j) : |i-j| <= y/2}; y must be even.
SparsityPattern banded_pattern(Index dim, Index y);

/// Union over l = 0..z1 of the structural patterns S_l with S_0 = pattern(P)
/// and S_l = pattern(A S_{l-1} + S_{l-1} A), symmetrized. With a cap the
/// result is intersected with banded(cap).
SparsityPattern predict_pattern(const BandedMatrix& a, const BandedMatrix& p, Index z1,
                                std::optional<Index> bandwidth_cap = std::nullopt);

/// Structural pattern of A S + S A: the rows of the Lyapunov image reachable
/// from unknowns on S.
SparsityPattern row_reach(const BandedMatrix& a, const SparsityPattern& s);

}  // namespace lyapband
