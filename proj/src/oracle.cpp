#include "lyapband/oracle.hpp"

#include <cmath>
#include <string>

#include "lyapband/error.hpp"
#include "lyapband/spectral.hpp"

namespace lyapband {

namespace {

void check_oracle_dim(Index n, const char* op) {
  if (n > kDenseOracleMaxDim) {
    fail(ErrorCode::invalid_argument, std::string(op) + ": dimension " + std::to_string(n) +
                                          " exceeds the dense oracle cap of " +
                                          std::to_string(kDenseOracleMaxDim));
  }
}

// Y = A X for sparse A, dense X.
DenseMatrix sparse_dense_mul(const BandedMatrix& a, const DenseMatrix& x) {
  const Index n = a.dim();
  DenseMatrix y(n);
  for (Index i = 0; i < n; ++i) {
    const auto c = a.pattern().row(i);
    const auto v = a.row_values(i);
    double* yr = y.data() + i * n;
    for (std::size_t k = 0; k < c.size(); ++k) {
      const double* xr = x.data() + c[k] * n;
      for (Index j = 0; j < n; ++j) yr[j] += v[k] * xr[j];
    }
  }
  return y;
}

// Y = X A for dense X, sparse A.
DenseMatrix dense_sparse_mul(const DenseMatrix& x, const BandedMatrix& a) {
  const Index n = a.dim();
  DenseMatrix y(n);
  for (Index i = 0; i < n; ++i) {
    const double* xr = x.data() + i * n;
    double* yr = y.data() + i * n;
    for (Index k = 0; k < n; ++k) {
      const double xik = xr[k];
      if (xik == 0.0) continue;
      const auto c = a.pattern().row(k);
      const auto v = a.row_values(k);
      for (std::size_t q = 0; q < c.size(); ++q) yr[c[q]] += xik * v[q];
    }
  }
  return y;
}

DenseMatrix lyap_from_eigen(const SymmetricEigen& eig, const DenseMatrix& p) {
  const Index n = p.dim();
  const DenseMatrix& qt = eig.vectors_rows;  // Q^T
  // C = Q^T P Q, then divide by lambda_i + lambda_j.
  DenseMatrix c = dense_mul(dense_mul(qt, p), qt, false, true);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      const double denom = eig.values[i] + eig.values[j];
      if (denom == 0.0) {
        fail(ErrorCode::numerical, "dense_lyap: lambda_i + lambda_j = 0, A is not stable");
      }
      c(i, j) /= denom;
    }
  }
  // X = Q C Q^T
  return dense_mul(qt, dense_mul(c, qt), true, false);
}

bool is_symmetric_dense(const DenseMatrix& x) { return x.max_asymmetry() == 0.0; }

}  // namespace

double lyap_relative_residual(const DenseMatrix& a, const DenseMatrix& p, const DenseMatrix& x) {
  const DenseMatrix ax = dense_mul(a, x);
  const DenseMatrix xa = dense_mul(x, a, false, true);
  const DenseMatrix r = dense_add(dense_add(p, ax, 1.0, -1.0), xa, 1.0, -1.0);
  const double pn = p.frobenius_norm();
  return pn > 0.0 ? r.frobenius_norm() / pn : r.frobenius_norm();
}

double lyap_relative_residual(const BandedMatrix& a, const BandedMatrix& p, const DenseMatrix& x) {
  require_same_dim(a.dim(), x.dim(), "lyap_relative_residual");
  const DenseMatrix ax = sparse_dense_mul(a, x);
  const DenseMatrix xa = dense_sparse_mul(x, a.transposed());
  const DenseMatrix r = dense_add(dense_add(p, ax, 1.0, -1.0), xa, 1.0, -1.0);
  const double pn = p.frobenius_norm();
  return pn > 0.0 ? r.frobenius_norm() / pn : r.frobenius_norm();
}

DenseMatrix dense_lyap(const DenseMatrix& a, const DenseMatrix& p) {
  require_same_dim(a.dim(), p.dim(), "dense_lyap");
  check_oracle_dim(a.dim(), "dense_lyap");
  DenseMatrix x = lyap_from_eigen(symmetric_eigen(a), p);
  if (is_symmetric_dense(p)) x = x.symmetrized();
  const double res = lyap_relative_residual(a, p, x);
  if (!(res <= 1e-10)) {
    fail(ErrorCode::numerical, "dense_lyap: residual check failed (relative residual " +
                                   std::to_string(res) + ")");
  }
  return x;
}

DenseMatrix dense_lyap(const BandedMatrix& a, const BandedMatrix& p) {
  require_same_dim(a.dim(), p.dim(), "dense_lyap");
  check_oracle_dim(a.dim(), "dense_lyap");
  if (!a.symmetric()) fail(ErrorCode::not_symmetric, "dense_lyap: A must be symmetric");
  DenseMatrix x = lyap_from_eigen(symmetric_eigen(DenseMatrix::from_banded(a)),
                                  DenseMatrix::from_banded(p));
  if (p.symmetric()) x = x.symmetrized();
  const double res = lyap_relative_residual(a, p, x);
  if (!(res <= 1e-10)) {
    fail(ErrorCode::numerical, "dense_lyap: residual check failed (relative residual " +
                                   std::to_string(res) + ")");
  }
  return x;
}

DenseMatrix dense_expm(const DenseMatrix& a, double t) {
  check_oracle_dim(a.dim(), "dense_expm");
  const Index n = a.dim();
  SymmetricEigen eig = symmetric_eigen(a);
  // exp(tA) = S^T S with S = diag(exp(t lambda / 2)) Q^T.
  DenseMatrix s = std::move(eig.vectors_rows);
  for (Index k = 0; k < n; ++k) {
    const double f = std::exp(0.5 * t * eig.values[k]);
    for (Index i = 0; i < n; ++i) s(k, i) *= f;
  }
  return dense_mul(s, s, true, false).symmetrized();
}

DenseMatrix kron_assemble(const BandedMatrix& a) {
  const Index n = a.dim();
  if (n > kKronMaxDim) {
    fail(ErrorCode::invalid_argument, "kron_assemble: dimension " + std::to_string(n) +
                                          " exceeds the cap of " + std::to_string(kKronMaxDim));
  }
  const Index nn = n * n;
  DenseMatrix k(nn);
  // Column-major vec: X_ij sits at index i + j*n.
  // (A X)_ij = sum_l a_il x_lj  -> I (x) A; (X A^T)_ij = sum_l a_jl x_il -> A (x) I.
  for (Index i = 0; i < n; ++i) {
    const auto c = a.pattern().row(i);
    const auto v = a.row_values(i);
    for (std::size_t p = 0; p < c.size(); ++p) {
      const Index l = c[p];
      for (Index j = 0; j < n; ++j) {
        k(i + j * n, l + j * n) += v[p];  // A X term, row (i,j) col (l,j)
        k(j + i * n, j + l * n) += v[p];  // X A^T term, row (j,i) col (j,l)
      }
    }
  }
  return k;
}

double accuracy(const DenseMatrix& approx, const DenseMatrix& truth) {
  require_same_dim(approx.dim(), truth.dim(), "accuracy");
  const double tn = norm2_est(truth, 1e-8);
  if (tn == 0.0) fail(ErrorCode::invalid_argument, "accuracy: reference solution is zero");
  return norm2_est(dense_add(approx, truth, 1.0, -1.0), 1e-8) / tn;
}

double accuracy(const BandedMatrix& approx, const DenseMatrix& truth) {
  return accuracy(DenseMatrix::from_banded(approx), truth);
}

}  // namespace lyapband
