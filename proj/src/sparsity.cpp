#include "lyapband/sparsity.hpp"

#include <algorithm>
#include <string>

#include "lyapband/error.hpp"

namespace lyapband {

namespace {

Index offset(Index i, Index j) { return i > j ? i - j : j - i; }

}  // namespace

std::size_t banded_count(Index dim, Index half_width) {
  if (dim == 0) return 0;
  const Index h = std::min(half_width, dim - 1);
  // dim diagonal entries plus 2 * sum_{k=1..h} (dim - k)
  return dim + 2 * (h * dim - h * (h + 1) / 2);
}

SparsityPattern::SparsityPattern(Index dim) : dim_(dim), row_ptr_(dim + 1, 0) {}

SparsityPattern::SparsityPattern(Index dim, std::vector<Index> row_ptr, std::vector<Index> cols)
    : dim_(dim), row_ptr_(std::move(row_ptr)), cols_(std::move(cols)) {
  if (row_ptr_.size() != dim_ + 1 || row_ptr_.front() != 0 || row_ptr_.back() != cols_.size()) {
    fail(ErrorCode::invalid_argument, "SparsityPattern: inconsistent row pointer array");
  }
  for (Index i = 0; i < dim_; ++i) {
    if (row_ptr_[i] > row_ptr_[i + 1]) {
      fail(ErrorCode::invalid_argument, "SparsityPattern: row pointers not monotone");
    }
    for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
      if (cols_[p] >= dim_) {
        fail(ErrorCode::invalid_argument,
             "SparsityPattern: column index out of range in row " + std::to_string(i));
      }
      if (p > row_ptr_[i] && cols_[p] <= cols_[p - 1]) {
        fail(ErrorCode::invalid_argument,
             "SparsityPattern: row " + std::to_string(i) + " not strictly sorted");
      }
    }
  }
  detect_band();
}

void SparsityPattern::detect_band() {
  const Index h = max_offset();
  if (nnz() == banded_count(dim_, h)) {
    band_half_width_ = h;
  } else {
    band_half_width_.reset();
  }
}

SparsityPattern SparsityPattern::banded(Index dim, Index half_width) {
  SparsityPattern s(dim);
  s.cols_.reserve(banded_count(dim, half_width));
  for (Index i = 0; i < dim; ++i) {
    const Index lo = i > half_width ? i - half_width : 0;
    const Index hi = std::min(dim - 1, i + half_width);
    for (Index j = lo; j <= hi; ++j) s.cols_.push_back(j);
    s.row_ptr_[i + 1] = s.cols_.size();
  }
  s.band_half_width_ = half_width;
  return s;
}

SparsityPattern SparsityPattern::full(Index dim) {
  return banded(dim, dim == 0 ? 0 : dim - 1);
}

SparsityPattern SparsityPattern::from_pairs(Index dim, std::vector<std::pair<Index, Index>> pairs) {
  for (const auto& [i, j] : pairs) {
    if (i >= dim || j >= dim) fail(ErrorCode::invalid_argument, "from_pairs: index out of range");
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  SparsityPattern s(dim);
  s.cols_.reserve(pairs.size());
  for (const auto& [i, j] : pairs) {
    s.cols_.push_back(j);
    ++s.row_ptr_[i + 1];
  }
  for (Index i = 0; i < dim; ++i) s.row_ptr_[i + 1] += s.row_ptr_[i];
  s.detect_band();
  return s;
}

std::optional<std::size_t> SparsityPattern::find(Index i, Index j) const {
  if (i >= dim_ || j >= dim_) return std::nullopt;
  const auto r = row(i);
  const auto it = std::lower_bound(r.begin(), r.end(), j);
  if (it == r.end() || *it != j) return std::nullopt;
  return row_ptr_[i] + static_cast<std::size_t>(it - r.begin());
}

bool SparsityPattern::contains(Index i, Index j) const { return find(i, j).has_value(); }

Index SparsityPattern::max_offset() const noexcept {
  Index best = 0;
  for (Index i = 0; i < dim_; ++i) {
    const auto r = row(i);
    if (r.empty()) continue;
    best = std::max({best, offset(i, r.front()), offset(i, r.back())});
  }
  return best;
}

SparsityPattern SparsityPattern::transposed() const {
  SparsityPattern t(dim_);
  t.cols_.resize(cols_.size());
  for (Index c : cols_) ++t.row_ptr_[c + 1];
  for (Index i = 0; i < dim_; ++i) t.row_ptr_[i + 1] += t.row_ptr_[i];
  std::vector<Index> next(t.row_ptr_.begin(), t.row_ptr_.end() - 1);
  for (Index i = 0; i < dim_; ++i) {
    for (Index c : row(i)) t.cols_[next[c]++] = i;
  }
  t.band_half_width_ = band_half_width_;
  return t;
}

bool SparsityPattern::is_symmetric() const { return *this == transposed(); }

bool SparsityPattern::is_subset_of(const SparsityPattern& other) const {
  if (dim_ != other.dim_) return false;
  for (Index i = 0; i < dim_; ++i) {
    const auto a = row(i);
    const auto b = other.row(i);
    if (!std::includes(b.begin(), b.end(), a.begin(), a.end())) return false;
  }
  return true;
}

SparsityPattern SparsityPattern::unite(const SparsityPattern& a, const SparsityPattern& b) {
  require_same_dim(a.dim_, b.dim_, "pattern union");
  SparsityPattern s(a.dim_);
  s.cols_.reserve(std::max(a.nnz(), b.nnz()));
  for (Index i = 0; i < a.dim_; ++i) {
    const auto ra = a.row(i);
    const auto rb = b.row(i);
    std::set_union(ra.begin(), ra.end(), rb.begin(), rb.end(), std::back_inserter(s.cols_));
    s.row_ptr_[i + 1] = s.cols_.size();
  }
  s.detect_band();
  return s;
}

SparsityPattern SparsityPattern::intersect(const SparsityPattern& a, const SparsityPattern& b) {
  require_same_dim(a.dim_, b.dim_, "pattern intersection");
  SparsityPattern s(a.dim_);
  for (Index i = 0; i < a.dim_; ++i) {
    const auto ra = a.row(i);
    const auto rb = b.row(i);
    std::set_intersection(ra.begin(), ra.end(), rb.begin(), rb.end(),
                          std::back_inserter(s.cols_));
    s.row_ptr_[i + 1] = s.cols_.size();
  }
  s.detect_band();
  return s;
}

SparsityPattern SparsityPattern::product(const SparsityPattern& a, const SparsityPattern& b) {
  require_same_dim(a.dim_, b.dim_, "pattern product");
  const Index n = a.dim_;
  SparsityPattern s(n);
  std::vector<char> mark(n, 0);
  std::vector<Index> touched;
  for (Index i = 0; i < n; ++i) {
    touched.clear();
    for (Index k : a.row(i)) {
      for (Index j : b.row(k)) {
        if (!mark[j]) {
          mark[j] = 1;
          touched.push_back(j);
        }
      }
    }
    std::sort(touched.begin(), touched.end());
    for (Index j : touched) mark[j] = 0;
    s.cols_.insert(s.cols_.end(), touched.begin(), touched.end());
    s.row_ptr_[i + 1] = s.cols_.size();
  }
  s.detect_band();
  return s;
}

SparsityPattern SparsityPattern::restricted_to_band(Index half_width) const {
  SparsityPattern s(dim_);
  for (Index i = 0; i < dim_; ++i) {
    for (Index j : row(i)) {
      if (offset(i, j) <= half_width) s.cols_.push_back(j);
    }
    s.row_ptr_[i + 1] = s.cols_.size();
  }
  s.detect_band();
  return s;
}

}  // namespace lyapband
