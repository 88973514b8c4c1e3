#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace lyapband {

using Index = std::size_t;

/// Structural index set over a dim x dim grid, stored as per-row sorted column
/// lists (compressed row layout). Indices are 0-based internally.
///
/// Every pattern that is exactly {(i,j) : |i-j| <= h} carries a band tag with
/// its half-width h; the tag is detected on construction.
class SparsityPattern {
 public:
  SparsityPattern() = default;
  explicit SparsityPattern(Index dim);  // empty pattern

  /// Takes ownership of a compressed row layout. Rows must be sorted and
  /// duplicate-free; throws otherwise.
  SparsityPattern(Index dim, std::vector<Index> row_ptr, std::vector<Index> cols);

  static SparsityPattern banded(Index dim, Index half_width);
  static SparsityPattern full(Index dim);
  static SparsityPattern diagonal(Index dim) { return banded(dim, 0); }
  /// Unsorted (i,j) pairs, duplicates allowed.
  static SparsityPattern from_pairs(Index dim, std::vector<std::pair<Index, Index>> pairs);

  Index dim() const noexcept { return dim_; }
  std::size_t nnz() const noexcept { return cols_.size(); }
  std::span<const Index> row(Index i) const noexcept {
    return {cols_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
  }
  const std::vector<Index>& row_ptr() const noexcept { return row_ptr_; }
  const std::vector<Index>& cols() const noexcept { return cols_; }

  bool contains(Index i, Index j) const;
  /// Position of (i,j) in the value array, or nullopt when not structural.
  std::optional<std::size_t> find(Index i, Index j) const;

  /// max |i-j| over entries (0 for an empty pattern).
  Index max_offset() const noexcept;
  /// Bandwidth in the s convention: 2 * max_offset.
  Index bandwidth() const noexcept { return 2 * max_offset(); }
  std::optional<Index> band_tag() const noexcept { return band_half_width_; }

  bool is_symmetric() const;
  SparsityPattern transposed() const;
  SparsityPattern symmetrized() const { return unite(*this, transposed()); }
  bool is_subset_of(const SparsityPattern& other) const;

  static SparsityPattern unite(const SparsityPattern& a, const SparsityPattern& b);
  static SparsityPattern intersect(const SparsityPattern& a, const SparsityPattern& b);
  /// Structural pattern of the product a*b.
  static SparsityPattern product(const SparsityPattern& a, const SparsityPattern& b);
  /// Keeps entries with |i-j| <= half_width.
  SparsityPattern restricted_to_band(Index half_width) const;

  friend bool operator==(const SparsityPattern& a, const SparsityPattern& b) {
    return a.dim_ == b.dim_ && a.row_ptr_ == b.row_ptr_ && a.cols_ == b.cols_;
  }

 private:
  void detect_band();

  Index dim_ = 0;
  std::vector<Index> row_ptr_{0};
  std::vector<Index> cols_;
  std::optional<Index> band_half_width_;
};

/// Number of entries of a dim x dim pattern with |i-j| <= h.
std::size_t banded_count(Index dim, Index half_width);

}  // namespace lyapband
