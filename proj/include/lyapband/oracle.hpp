#pragma once

#include "lyapband/banded_matrix.hpp"
#include "lyapband/dense.hpp"

namespace lyapband {

inline constexpr Index kDenseOracleMaxDim = 4096;
inline constexpr Index kKronMaxDim = 72;

/// Exact solution of A X + X A = P for symmetric stable A through
/// A = Q diag(lambda) Q^T and X = Q [(Q^T P Q)_ij / (lambda_i + lambda_j)] Q^T.
/// Throws unless ||P - A X - X A||_F <= 1e-10 ||P||_F.
DenseMatrix dense_lyap(const DenseMatrix& a, const DenseMatrix& p);
DenseMatrix dense_lyap(const BandedMatrix& a, const BandedMatrix& p);

/// ||P - A X - X A||_F / ||P||_F.
double lyap_relative_residual(const DenseMatrix& a, const DenseMatrix& p, const DenseMatrix& x);
double lyap_relative_residual(const BandedMatrix& a, const BandedMatrix& p, const DenseMatrix& x);

/// exp(t A) = Q diag(exp(t lambda)) Q^T for symmetric A; exactly symmetric.
DenseMatrix dense_expm(const DenseMatrix& a, double t);

/// Dense Kronecker sum I (x) A + A (x) I, so that K vec(X) = vec(A X + X A^T)
/// with column-major vec. dim(A) <= 72.
DenseMatrix kron_assemble(const BandedMatrix& a);

/// ||approx - truth||_2 / ||truth||_2.
double accuracy(const DenseMatrix& approx, const DenseMatrix& truth);
double accuracy(const BandedMatrix& approx, const DenseMatrix& truth);

}  // namespace lyapband
