#include "lyapband/banded_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lyapband/error.hpp"

namespace lyapband {

namespace {

Index offset(Index i, Index j) { return i > j ? i - j : j - i; }

}  // namespace

BandedMatrix::BandedMatrix(SparsityPattern pattern, std::vector<double> values, bool symmetric)
    : pattern_(std::move(pattern)), values_(std::move(values)), symmetric_(symmetric) {
  if (values_.size() != pattern_.nnz()) {
    fail(ErrorCode::invalid_argument, "BandedMatrix: value count " +
                                          std::to_string(values_.size()) +
                                          " does not match pattern size " +
                                          std::to_string(pattern_.nnz()));
  }
  if (symmetric_ && !is_exactly_symmetric()) {
    fail(ErrorCode::not_symmetric, "BandedMatrix: flagged symmetric but entries differ");
  }
}

BandedMatrix BandedMatrix::zeros(SparsityPattern pattern, bool symmetric) {
  std::vector<double> v(pattern.nnz(), 0.0);
  const bool sym = symmetric && pattern.is_symmetric();
  return BandedMatrix(std::move(pattern), std::move(v), sym);
}

BandedMatrix BandedMatrix::identity(Index dim) {
  return BandedMatrix(SparsityPattern::diagonal(dim), std::vector<double>(dim, 1.0), true);
}

BandedMatrix BandedMatrix::diagonal(std::span<const double> diag) {
  return BandedMatrix(SparsityPattern::diagonal(diag.size()),
                      std::vector<double>(diag.begin(), diag.end()), true);
}

BandedMatrix BandedMatrix::from_triplets(Index dim, std::vector<Triplet> triplets) {
  for (const auto& t : triplets) {
    if (t.row >= dim || t.col >= dim) {
      fail(ErrorCode::invalid_argument, "from_triplets: index out of range");
    }
  }
  std::stable_sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  std::vector<Index> row_ptr(dim + 1, 0);
  std::vector<Index> cols;
  std::vector<double> vals;
  cols.reserve(triplets.size());
  vals.reserve(triplets.size());
  for (std::size_t p = 0; p < triplets.size(); ++p) {
    const auto& t = triplets[p];
    if (!cols.empty() && p > 0 && triplets[p - 1].row == t.row && triplets[p - 1].col == t.col) {
      vals.back() += t.value;
      continue;
    }
    cols.push_back(t.col);
    vals.push_back(t.value);
    ++row_ptr[t.row + 1];
  }
  for (Index i = 0; i < dim; ++i) row_ptr[i + 1] += row_ptr[i];
  BandedMatrix m(SparsityPattern(dim, std::move(row_ptr), std::move(cols)), std::move(vals));
  m.symmetric_ = m.is_exactly_symmetric();
  return m;
}

BandedMatrix BandedMatrix::from_dense(Index dim, std::span<const double> row_major) {
  if (row_major.size() != dim * dim) {
    fail(ErrorCode::invalid_argument, "from_dense: expected dim*dim values");
  }
  BandedMatrix m(SparsityPattern::full(dim),
                 std::vector<double>(row_major.begin(), row_major.end()));
  m.symmetric_ = m.is_exactly_symmetric();
  return m;
}

double BandedMatrix::at(Index i, Index j) const {
  const auto p = pattern_.find(i, j);
  return p ? values_[*p] : 0.0;
}

std::vector<Triplet> BandedMatrix::triplets() const {
  std::vector<Triplet> out;
  out.reserve(nnz());
  for (Index i = 0; i < dim(); ++i) {
    const auto cols = pattern_.row(i);
    const auto vals = row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k) out.push_back({i, cols[k], vals[k]});
  }
  return out;
}

std::vector<double> BandedMatrix::to_dense() const {
  const Index n = dim();
  std::vector<double> d(n * n, 0.0);
  for (Index i = 0; i < n; ++i) {
    const auto cols = pattern_.row(i);
    const auto vals = row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k) d[i * n + cols[k]] = vals[k];
  }
  return d;
}

bool BandedMatrix::is_exactly_symmetric() const {
  for (Index i = 0; i < dim(); ++i) {
    const auto cols = pattern_.row(i);
    const auto vals = row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      const auto q = pattern_.find(cols[k], i);
      if (!q || values_[*q] != vals[k]) return false;
    }
  }
  return true;
}

double BandedMatrix::max_asymmetry() const {
  double worst = 0.0;
  for (Index i = 0; i < dim(); ++i) {
    const auto cols = pattern_.row(i);
    const auto vals = row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      worst = std::max(worst, std::abs(vals[k] - at(cols[k], i)));
    }
  }
  return worst;
}

BandedMatrix BandedMatrix::transposed() const {
  const Index n = dim();
  SparsityPattern tp = pattern_.transposed();
  std::vector<double> tv(nnz());
  std::vector<Index> next(tp.row_ptr().begin(), tp.row_ptr().end() - 1);
  for (Index i = 0; i < n; ++i) {
    const auto cols = pattern_.row(i);
    const auto vals = row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k) tv[next[cols[k]]++] = vals[k];
  }
  return BandedMatrix(std::move(tp), std::move(tv), symmetric_);
}

BandedMatrix BandedMatrix::symmetrized() const {
  if (symmetric_) return *this;
  const BandedMatrix t = transposed();
  // 0.5*x + 0.5*y is commutative in floating point, so the result is exact-symmetric.
  BandedMatrix s = band_add(*this, t, 0.5, 0.5);
  s.mark_symmetric();
  return s;
}

BandedMatrix BandedMatrix::embedded_in(const SparsityPattern& superset) const {
  require_same_dim(dim(), superset.dim(), "embedded_in");
  std::vector<double> v(superset.nnz(), 0.0);
  for (Index i = 0; i < dim(); ++i) {
    const auto cols = pattern_.row(i);
    const auto vals = row_values(i);
    const auto scols = superset.row(i);
    std::size_t q = 0;
    for (std::size_t k = 0; k < cols.size(); ++k) {
      while (q < scols.size() && scols[q] < cols[k]) ++q;
      if (q == scols.size() || scols[q] != cols[k]) {
        fail(ErrorCode::invalid_argument, "embedded_in: target pattern is not a superset");
      }
      v[superset.row_ptr()[i] + q] = vals[k];
    }
  }
  const bool sym = symmetric_ && superset.is_symmetric();
  return BandedMatrix(superset, std::move(v), sym);
}

BandedMatrix BandedMatrix::scaled(double alpha) const {
  std::vector<double> v(values_);
  for (double& x : v) x *= alpha;
  return BandedMatrix(pattern_, std::move(v), symmetric_);
}

void BandedMatrix::mark_symmetric() {
  if (!is_exactly_symmetric()) {
    fail(ErrorCode::not_symmetric, "mark_symmetric: entries are not exactly symmetric");
  }
  symmetric_ = true;
}

double BandedMatrix::frobenius_norm() const {
  double s = 0.0;
  for (double v : values_) s += v * v;
  return std::sqrt(s);
}

BandedMatrix band_add(const BandedMatrix& x1, const BandedMatrix& x2, double alpha, double beta) {
  require_same_dim(x1.dim(), x2.dim(), "band_add");
  const Index n = x1.dim();
  std::vector<Index> row_ptr(n + 1, 0);
  std::vector<Index> cols;
  std::vector<double> vals;
  cols.reserve(std::max(x1.nnz(), x2.nnz()));
  vals.reserve(cols.capacity());
  for (Index i = 0; i < n; ++i) {
    const auto c1 = x1.pattern().row(i);
    const auto v1 = x1.row_values(i);
    const auto c2 = x2.pattern().row(i);
    const auto v2 = x2.row_values(i);
    std::size_t p = 0;
    std::size_t q = 0;
    while (p < c1.size() || q < c2.size()) {
      if (q == c2.size() || (p < c1.size() && c1[p] < c2[q])) {
        cols.push_back(c1[p]);
        vals.push_back(alpha * v1[p]);
        ++p;
      } else if (p == c1.size() || c2[q] < c1[p]) {
        cols.push_back(c2[q]);
        vals.push_back(beta * v2[q]);
        ++q;
      } else {
        cols.push_back(c1[p]);
        vals.push_back(alpha * v1[p] + beta * v2[q]);
        ++p;
        ++q;
      }
    }
    row_ptr[i + 1] = cols.size();
  }
  return BandedMatrix(SparsityPattern(n, std::move(row_ptr), std::move(cols)), std::move(vals),
                      x1.symmetric() && x2.symmetric());
}

BandedMatrix band_mul(const BandedMatrix& x1, const BandedMatrix& x2) {
  require_same_dim(x1.dim(), x2.dim(), "band_mul");
  const Index n = x1.dim();
  std::vector<double> acc(n, 0.0);
  std::vector<char> mark(n, 0);
  std::vector<Index> touched;
  std::vector<Index> row_ptr(n + 1, 0);
  std::vector<Index> cols;
  std::vector<double> vals;
  for (Index i = 0; i < n; ++i) {
    touched.clear();
    const auto c1 = x1.pattern().row(i);
    const auto v1 = x1.row_values(i);
    for (std::size_t p = 0; p < c1.size(); ++p) {
      const Index k = c1[p];
      const double a = v1[p];
      const auto c2 = x2.pattern().row(k);
      const auto v2 = x2.row_values(k);
      for (std::size_t q = 0; q < c2.size(); ++q) {
        const Index j = c2[q];
        if (!mark[j]) {
          mark[j] = 1;
          touched.push_back(j);
        }
        acc[j] += a * v2[q];
      }
    }
    std::sort(touched.begin(), touched.end());
    for (Index j : touched) {
      cols.push_back(j);
      vals.push_back(acc[j]);
      acc[j] = 0.0;
      mark[j] = 0;
    }
    row_ptr[i + 1] = cols.size();
  }
  return BandedMatrix(SparsityPattern(n, std::move(row_ptr), std::move(cols)), std::move(vals),
                      false);
}

BandedMatrix band_project(const BandedMatrix& x, Index d) {
  const Index half = d / 2;
  const Index n = x.dim();
  std::vector<Index> row_ptr(n + 1, 0);
  std::vector<Index> cols;
  std::vector<double> vals;
  cols.reserve(x.nnz());
  vals.reserve(x.nnz());
  for (Index i = 0; i < n; ++i) {
    const auto c = x.pattern().row(i);
    const auto v = x.row_values(i);
    for (std::size_t k = 0; k < c.size(); ++k) {
      if (offset(i, c[k]) <= half) {
        cols.push_back(c[k]);
        vals.push_back(v[k]);
      }
    }
    row_ptr[i + 1] = cols.size();
  }
  return BandedMatrix(SparsityPattern(n, std::move(row_ptr), std::move(cols)), std::move(vals),
                      x.symmetric());
}

BandedMatrix pattern_project(const BandedMatrix& x, const SparsityPattern& s) {
  require_same_dim(x.dim(), s.dim(), "pattern_project");
  const Index n = x.dim();
  std::vector<Index> row_ptr(n + 1, 0);
  std::vector<Index> cols;
  std::vector<double> vals;
  for (Index i = 0; i < n; ++i) {
    const auto c = x.pattern().row(i);
    const auto v = x.row_values(i);
    const auto sc = s.row(i);
    std::size_t q = 0;
    for (std::size_t k = 0; k < c.size(); ++k) {
      while (q < sc.size() && sc[q] < c[k]) ++q;
      if (q < sc.size() && sc[q] == c[k]) {
        cols.push_back(c[k]);
        vals.push_back(v[k]);
      }
    }
    row_ptr[i + 1] = cols.size();
  }
  SparsityPattern pat(n, std::move(row_ptr), std::move(cols));
  const bool sym = x.symmetric() && s.is_symmetric();
  return BandedMatrix(std::move(pat), std::move(vals), sym);
}

double frobenius_inner(const BandedMatrix& x, const BandedMatrix& y) {
  require_same_dim(x.dim(), y.dim(), "frobenius_inner");
  double s = 0.0;
  for (Index i = 0; i < x.dim(); ++i) {
    const auto cx = x.pattern().row(i);
    const auto vx = x.row_values(i);
    const auto cy = y.pattern().row(i);
    const auto vy = y.row_values(i);
    std::size_t p = 0;
    std::size_t q = 0;
    while (p < cx.size() && q < cy.size()) {
      if (cx[p] < cy[q]) {
        ++p;
      } else if (cy[q] < cx[p]) {
        ++q;
      } else {
        s += vx[p] * vy[q];
        ++p;
        ++q;
      }
    }
  }
  return s;
}

BandedMatrix lyapunov_image(const BandedMatrix& a, const BandedMatrix& x) {
  require_same_dim(a.dim(), x.dim(), "lyapunov_image");
  const BandedMatrix at = a.symmetric() ? a : a.transposed();
  BandedMatrix y = band_add(band_mul(a, x), band_mul(x, at));
  if (a.symmetric() && x.symmetric()) y.mark_symmetric();
  return y;
}

LyapunovKernel::LyapunovKernel(Index dim)
    : acc_left_(dim, 0.0), acc_right_(dim, 0.0), mark_(dim, 0) {}

void LyapunovKernel::apply(const BandedMatrix& a, const SparsityPattern& source,
                           std::span<const double> x, const SparsityPattern& target,
                           std::span<double> y) {
  const Index n = a.dim();
  if (!a.symmetric()) fail(ErrorCode::not_symmetric, "LyapunovKernel: A must be symmetric");
  if (source.dim() != n || target.dim() != n || acc_left_.size() != n) {
    fail(ErrorCode::dimension_mismatch, "LyapunovKernel: inconsistent dimensions");
  }
  if (x.size() != source.nnz() || y.size() != target.nnz()) {
    fail(ErrorCode::dimension_mismatch, "LyapunovKernel: value arrays do not match patterns");
  }
  const auto& src_ptr = source.row_ptr();
  const auto& tgt_ptr = target.row_ptr();
  for (Index i = 0; i < n; ++i) {
    // (A X)_ij
    const auto ac = a.pattern().row(i);
    const auto av = a.row_values(i);
    for (std::size_t p = 0; p < ac.size(); ++p) {
      const Index k = ac[p];
      const double aik = av[p];
      const auto xc = source.row(k);
      const double* xv = x.data() + src_ptr[k];
      for (std::size_t q = 0; q < xc.size(); ++q) {
        const Index j = xc[q];
        if (!mark_[j]) {
          mark_[j] = 1;
          touched_.push_back(j);
        }
        acc_left_[j] += aik * xv[q];
      }
    }
    // (X A)_ij
    const auto xc = source.row(i);
    const double* xv = x.data() + src_ptr[i];
    for (std::size_t p = 0; p < xc.size(); ++p) {
      const Index k = xc[p];
      const double xik = xv[p];
      const auto kc = a.pattern().row(k);
      const auto kv = a.row_values(k);
      for (std::size_t q = 0; q < kc.size(); ++q) {
        const Index j = kc[q];
        if (!mark_[j]) {
          mark_[j] = 1;
          touched_.push_back(j);
        }
        acc_right_[j] += xik * kv[q];
      }
    }
    const auto tc = target.row(i);
    double* yv = y.data() + tgt_ptr[i];
    for (std::size_t p = 0; p < tc.size(); ++p) {
      yv[p] = acc_left_[tc[p]] + acc_right_[tc[p]];
    }
    for (Index j : touched_) {
      acc_left_[j] = 0.0;
      acc_right_[j] = 0.0;
      mark_[j] = 0;
    }
    touched_.clear();
  }
}

}  // namespace lyapband
