#pragma once

#include <functional>
#include <span>

#include "lyapband/banded_matrix.hpp"
#include "lyapband/dense.hpp"

namespace lyapband {

struct SpectralSummary {
  double a = 0.0;      // most negative eigenvalue
  double b = 0.0;      // least negative eigenvalue
  double kappa = 0.0;  // a / b
  double rel_tol = 0.0;
  int iterations = 0;
  bool converged = false;
};

inline constexpr double kDefaultSpectralTol = 1e-6;

/// y = Op(x) for a symmetric operator of the given dimension.
using SymmetricOperator = std::function<void(std::span<const double>, std::span<double>)>;

struct RitzExtremes {
  double lowest = 0.0;
  double highest = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Lanczos with full reorthogonalization. Converged when both extreme Ritz
/// residuals satisfy |beta * s| <= rel_tol * |theta|, which bounds the
/// eigenvalue errors by rel_tol relative. With need_lowest unset only the
/// largest Ritz value has to converge.
RitzExtremes lanczos_extremes(Index dim, const SymmetricOperator& op, double rel_tol,
                              int max_iter = 600, bool need_lowest = true);

/// Extreme eigenvalues of symmetric A using matrix-vector products only.
SpectralSummary extreme_eigs(const BandedMatrix& a, double rel_tol = kDefaultSpectralTol,
                             int max_iter = 600);

/// Interval [lo, hi] enclosing the spectrum: Ritz values lie inside it, so
/// each end moves outwards by rel_tol times its magnitude.
struct SpectralInterval {
  double lo = 0.0;
  double hi = 0.0;
};
SpectralInterval enclosing_interval(const SpectralSummary& spec);

/// Spectral norm through Lanczos on X^T X.
double norm2_est(const BandedMatrix& x, double rel_tol = kDefaultSpectralTol);
double norm2_est(const DenseMatrix& x, double rel_tol = kDefaultSpectralTol);

/// y = X x for a sparse matrix.
void band_matvec(const BandedMatrix& x, std::span<const double> in, std::span<double> out);

}  // namespace lyapband
