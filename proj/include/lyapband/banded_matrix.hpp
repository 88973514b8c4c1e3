#pragma once

#include <cstddef>
#include <span>
#include <tuple>
#include <vector>

#include "lyapband/sparsity.hpp"

namespace lyapband {

struct Triplet {
  Index row;
  Index col;
  double value;
};

/// Square sparse matrix with an explicit structural pattern. Explicit zeros
/// stay in the pattern; entries only leave it through the projection
/// operators.
///
/// The symmetric flag is checked, not trusted: constructing with
/// symmetric=true throws unless pattern and values are exactly symmetric.
class BandedMatrix {
 public:
  BandedMatrix() = default;
  BandedMatrix(SparsityPattern pattern, std::vector<double> values, bool symmetric = false);

  static BandedMatrix zeros(SparsityPattern pattern, bool symmetric = false);
  static BandedMatrix identity(Index dim);
  static BandedMatrix diagonal(std::span<const double> diag);
  /// Duplicates are summed. Flags symmetric when the result is exactly symmetric.
  static BandedMatrix from_triplets(Index dim, std::vector<Triplet> triplets);
  /// Row-major dense input; every entry (zeros included) becomes structural.
  static BandedMatrix from_dense(Index dim, std::span<const double> row_major);

  Index dim() const noexcept { return pattern_.dim(); }
  std::size_t nnz() const noexcept { return values_.size(); }
  const SparsityPattern& pattern() const noexcept { return pattern_; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<const double> row_values(Index i) const noexcept {
    const auto& rp = pattern_.row_ptr();
    return {values_.data() + rp[i], rp[i + 1] - rp[i]};
  }
  bool symmetric() const noexcept { return symmetric_; }

  /// Value at (i,j); 0 for non-structural positions.
  double at(Index i, Index j) const;
  std::vector<Triplet> triplets() const;
  std::vector<double> to_dense() const;  // row-major

  Index max_offset() const noexcept { return pattern_.max_offset(); }
  bool is_exactly_symmetric() const;
  /// max |x_ij - x_ji| over the union of the pattern and its transpose.
  double max_asymmetry() const;
  BandedMatrix transposed() const;
  /// (X + X^T)/2 on the symmetrized pattern, flagged symmetric.
  BandedMatrix symmetrized() const;
  /// Same values embedded into a superset pattern (new positions are zero).
  BandedMatrix embedded_in(const SparsityPattern& superset) const;
  BandedMatrix scaled(double alpha) const;
  /// Sets the symmetric flag after verifying exact symmetry (throws otherwise).
  void mark_symmetric();

  double frobenius_norm() const;

 private:
  SparsityPattern pattern_;
  std::vector<double> values_;
  bool symmetric_ = false;
};

/// alpha*x1 + beta*x2 on the union pattern.
BandedMatrix band_add(const BandedMatrix& x1, const BandedMatrix& x2, double alpha = 1.0,
                      double beta = 1.0);

/// x1*x2 on the structural product pattern. Each output entry is accumulated
/// over the inner index in ascending order, so results are bit-reproducible.
/// The result is never flagged symmetric.
BandedMatrix band_mul(const BandedMatrix& x1, const BandedMatrix& x2);

/// Drops entries with |i-j| > d/2 (bandwidth projection).
BandedMatrix band_project(const BandedMatrix& x, Index d);

/// Keeps exactly the entries of x whose indices lie in s.
BandedMatrix pattern_project(const BandedMatrix& x, const SparsityPattern& s);

/// sum_ij x_ij * y_ij over the pattern intersection, i.e. trace(X^T Y).
double frobenius_inner(const BandedMatrix& x, const BandedMatrix& y);

/// A*X + X*A^T. Exactly symmetric whenever A and X are.
BandedMatrix lyapunov_image(const BandedMatrix& a, const BandedMatrix& x);

/// Fixed-pattern evaluation of Y = A*X + X*A for symmetric A: X is given by
/// values on `source`, Y is written on `target` (contributions falling outside
/// `target` are discarded). Reuses its workspace across calls; keep one
/// instance per thread.
class LyapunovKernel {
 public:
  explicit LyapunovKernel(Index dim);
  void apply(const BandedMatrix& a, const SparsityPattern& source, std::span<const double> x,
             const SparsityPattern& target, std::span<double> y);

 private:
  std::vector<double> acc_left_;
  std::vector<double> acc_right_;
  std::vector<char> mark_;
  std::vector<Index> touched_;
};

}  // namespace lyapband
