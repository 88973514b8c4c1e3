#pragma once

#include <span>
#include <vector>

#include "lyapband/banded_matrix.hpp"

namespace lyapband {

/// Row-major square dense matrix.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  explicit DenseMatrix(Index dim) : dim_(dim), values_(dim * dim, 0.0) {}
  DenseMatrix(Index dim, std::vector<double> row_major);

  static DenseMatrix identity(Index dim);
  static DenseMatrix from_banded(const BandedMatrix& x);

  Index dim() const noexcept { return dim_; }
  double& operator()(Index i, Index j) noexcept { return values_[i * dim_ + j]; }
  double operator()(Index i, Index j) const noexcept { return values_[i * dim_ + j]; }
  double* data() noexcept { return values_.data(); }
  const double* data() const noexcept { return values_.data(); }
  std::span<const double> values() const noexcept { return values_; }

  /// Every entry becomes structural; exact symmetry sets the flag.
  BandedMatrix to_banded() const;
  double frobenius_norm() const;
  double max_asymmetry() const;
  DenseMatrix transposed() const;
  /// (X + X^T)/2, exactly symmetric.
  DenseMatrix symmetrized() const;

 private:
  Index dim_ = 0;
  std::vector<double> values_;
};

/// x1 - x2 (or alpha*x1 + beta*x2).
DenseMatrix dense_add(const DenseMatrix& x1, const DenseMatrix& x2, double alpha = 1.0,
                      double beta = 1.0);
DenseMatrix dense_add(const BandedMatrix& x1, const DenseMatrix& x2, double alpha = 1.0,
                      double beta = 1.0);

/// op(x1) * op(x2) through BLAS.
DenseMatrix dense_mul(const DenseMatrix& x1, const DenseMatrix& x2, bool trans1 = false,
                      bool trans2 = false);

/// Symmetric eigendecomposition A = Q diag(values) Q^T (LAPACK dsyevd).
/// Eigenvalues ascend; row k of `vectors_rows` is the k-th unit eigenvector.
struct SymmetricEigen {
  std::vector<double> values;
  DenseMatrix vectors_rows;
};

/// Rejects inputs with max |a_ij - a_ji| > 1e-12 * max |a_ij|.
SymmetricEigen symmetric_eigen(const DenseMatrix& a);

/// max |(Q^T Q - I)_ij| for the eigenvectors of a decomposition.
double orthogonality_defect(const SymmetricEigen& eig);

/// Verifies BLAS/LAPACK results against plain loops once per process;
/// throws ErrorCode::numerical when the kernels are faulty.
void ensure_dense_kernels();

double max_abs_diff(const DenseMatrix& x, const DenseMatrix& y);

}  // namespace lyapband
