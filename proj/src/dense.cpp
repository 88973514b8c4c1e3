#include "lyapband/dense.hpp"

#include <cblas.h>
#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <string>

#include "lyapband/error.hpp"

namespace lyapband {

namespace {

// One-time check of the BLAS/LAPACK kernels against plain loops. Some
// virtualized CPUs advertise AVX-512 but corrupt OpenBLAS's AVX-512 kernels;
// failing loudly here beats returning wrong oracle values.
void verify_dense_kernels() {
  constexpr int n = 256;
  std::vector<double> a(n * n), b(n * n), c(n * n, 0.0);
  for (int k = 0; k < n * n; ++k) {
    a[k] = std::sin(0.37 * k + 1.0);
    b[k] = std::cos(0.11 * k - 2.0);
  }
  cblas_dgemm(CblasRowMajor, CblasNoTrans, CblasNoTrans, n, n, n, 1.0, a.data(), n, b.data(), n,
              0.0, c.data(), n);
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += a[i * n + k] * b[k * n + j];
      worst = std::max(worst, std::abs(s - c[i * n + j]));
    }
  }
  std::vector<double> x(n), y(n, 0.0);
  for (int k = 0; k < n; ++k) x[k] = std::sin(0.5 * k);
  cblas_dgemv(CblasRowMajor, CblasTrans, n, n, 1.0, a.data(), n, x.data(), 1, 0.0, y.data(), 1);
  for (int j = 0; j < n; ++j) {
    double s = 0.0;
    for (int k = 0; k < n; ++k) s += a[k * n + j] * x[k];
    worst = std::max(worst, std::abs(s - y[j]));
  }
  constexpr int m = 96;
  std::vector<double> t(m * m, 0.0), w(m);
  for (int i = 0; i < m; ++i) {
    t[i * m + i] = -2.0 - 0.01 * i;
    if (i + 1 < m) t[i * m + i + 1] = t[(i + 1) * m + i] = 1.0;
  }
  const std::vector<double> t0 = t;
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', m, t.data(), m, w.data());
  double eig_worst = info == 0 ? 0.0 : 1.0;
  for (int k = 0; k < m && info == 0; ++k) {
    for (int i = 0; i < m; ++i) {
      double s = 0.0;
      for (int j = 0; j < m; ++j) s += t0[i * m + j] * t[k * m + j];
      eig_worst = std::max(eig_worst, std::abs(s - w[k] * t[k * m + i]));
    }
  }
  if (worst > 1e-10 || eig_worst > 1e-10) {
    fail(ErrorCode::numerical,
         "dense kernel self-check failed (gemm error " + std::to_string(worst) +
             ", eigensolver error " + std::to_string(eig_worst) +
             "); on CPUs with faulty AVX-512 support set OPENBLAS_CORETYPE=Haswell");
  }
}

}  // namespace

void ensure_dense_kernels() {
  static std::once_flag flag;
  std::call_once(flag, verify_dense_kernels);
}

DenseMatrix::DenseMatrix(Index dim, std::vector<double> row_major)
    : dim_(dim), values_(std::move(row_major)) {
  if (values_.size() != dim_ * dim_) {
    fail(ErrorCode::invalid_argument, "DenseMatrix: expected dim*dim values");
  }
}

DenseMatrix DenseMatrix::identity(Index dim) {
  DenseMatrix d(dim);
  for (Index i = 0; i < dim; ++i) d(i, i) = 1.0;
  return d;
}

DenseMatrix DenseMatrix::from_banded(const BandedMatrix& x) {
  return DenseMatrix(x.dim(), x.to_dense());
}

BandedMatrix DenseMatrix::to_banded() const { return BandedMatrix::from_dense(dim_, values_); }

double DenseMatrix::frobenius_norm() const {
  double s = 0.0;
  for (double v : values_) s += v * v;
  return std::sqrt(s);
}

double DenseMatrix::max_asymmetry() const {
  double worst = 0.0;
  for (Index i = 0; i < dim_; ++i) {
    for (Index j = i + 1; j < dim_; ++j) worst = std::max(worst, std::abs((*this)(i, j) - (*this)(j, i)));
  }
  return worst;
}

DenseMatrix DenseMatrix::transposed() const {
  DenseMatrix t(dim_);
  for (Index i = 0; i < dim_; ++i) {
    for (Index j = 0; j < dim_; ++j) t(j, i) = (*this)(i, j);
  }
  return t;
}

DenseMatrix DenseMatrix::symmetrized() const {
  DenseMatrix s(dim_);
  for (Index i = 0; i < dim_; ++i) {
    s(i, i) = (*this)(i, i);
    for (Index j = i + 1; j < dim_; ++j) {
      const double v = 0.5 * (*this)(i, j) + 0.5 * (*this)(j, i);
      s(i, j) = v;
      s(j, i) = v;
    }
  }
  return s;
}

DenseMatrix dense_add(const DenseMatrix& x1, const DenseMatrix& x2, double alpha, double beta) {
  require_same_dim(x1.dim(), x2.dim(), "dense_add");
  DenseMatrix out(x1.dim());
  const std::size_t n = x1.dim() * x1.dim();
  for (std::size_t k = 0; k < n; ++k) out.data()[k] = alpha * x1.data()[k] + beta * x2.data()[k];
  return out;
}

DenseMatrix dense_add(const BandedMatrix& x1, const DenseMatrix& x2, double alpha, double beta) {
  return dense_add(DenseMatrix::from_banded(x1), x2, alpha, beta);
}

DenseMatrix dense_mul(const DenseMatrix& x1, const DenseMatrix& x2, bool trans1, bool trans2) {
  require_same_dim(x1.dim(), x2.dim(), "dense_mul");
  const auto n = static_cast<blasint>(x1.dim());
  DenseMatrix out(x1.dim());
  if (n == 0) return out;
  ensure_dense_kernels();
  cblas_dgemm(CblasRowMajor, trans1 ? CblasTrans : CblasNoTrans, trans2 ? CblasTrans : CblasNoTrans,
              n, n, n, 1.0, x1.data(), n, x2.data(), n, 0.0, out.data(), n);
  return out;
}

SymmetricEigen symmetric_eigen(const DenseMatrix& a) {
  const Index n = a.dim();
  double scale = 0.0;
  for (double v : a.values()) scale = std::max(scale, std::abs(v));
  if (a.max_asymmetry() > 1e-12 * scale) {
    fail(ErrorCode::not_symmetric, "symmetric_eigen: matrix is not symmetric");
  }
  SymmetricEigen out;
  out.values.assign(n, 0.0);
  if (n == 0) return out;
  ensure_dense_kernels();
  // Column-major call on the (symmetric) buffer: eigenvector k lands in
  // column k, which is row k of the row-major view.
  std::vector<double> work(a.values().begin(), a.values().end());
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', static_cast<lapack_int>(n),
                                         work.data(), static_cast<lapack_int>(n), out.values.data());
  if (info != 0) {
    fail(ErrorCode::numerical, "symmetric_eigen: dsyevd failed with info " + std::to_string(info));
  }
  out.vectors_rows = DenseMatrix(n, std::move(work));
  return out;
}

double orthogonality_defect(const SymmetricEigen& eig) {
  const DenseMatrix g = dense_mul(eig.vectors_rows, eig.vectors_rows, false, true);
  return max_abs_diff(g, DenseMatrix::identity(g.dim()));
}

double max_abs_diff(const DenseMatrix& x, const DenseMatrix& y) {
  require_same_dim(x.dim(), y.dim(), "max_abs_diff");
  double worst = 0.0;
  for (std::size_t k = 0; k < x.values().size(); ++k) {
    worst = std::max(worst, std::abs(x.values()[k] - y.values()[k]));
  }
  return worst;
}

}  // namespace lyapband
