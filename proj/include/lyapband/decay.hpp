#pragma once

#include <utility>
#include <vector>

#include "lyapband/banded_matrix.hpp"
#include "lyapband/dense.hpp"
#include "lyapband/spectral.hpp"

namespace lyapband {

enum class DecayContext { diagonal_rhs, kron_inverse };

/// |x_ij| <= tau * rho^|i-j| (or the analogue for the Kronecker inverse).
struct DecayEstimate {
  double tau = 0.0;
  double rho = 0.0;
  double k1 = 0.0;  // (1/|b|) max{1, (1+sqrt(kappa))^2 / (2 kappa)}
  DecayContext context = DecayContext::diagonal_rhs;
};

/// Bound for the solution of A X + X A = gamma I; m is the bandwidth of A
/// (s convention, 2 * max offset).
DecayEstimate decay_diagP(double gamma, const SpectralSummary& spec, Index m);

/// Bound for the entries of the inverse Kronecker sum; m1 = dim * m.
DecayEstimate decay_kron(const SpectralSummary& spec, Index m, Index dim);

/// tau1 * sum over structural p_ij of |p_ij| rho1^|phi(i,j) - s| with the
/// column-major 1-based index phi(i,j) = (j-1) dim + i; s is 1-based.
double entrywise_bound(const BandedMatrix& p, const DecayEstimate& est, Index s);

/// Per-offset profile max_{|i-j|=k} |x_ij| for k = 0..dim-1.
std::vector<double> empirical_decay(const DenseMatrix& x);
std::vector<double> empirical_decay(const BandedMatrix& x);

/// |x_{row, j}| for j = 0..dim-1.
std::vector<double> row_profile(const DenseMatrix& x, Index row);

/// exp of the least-squares slope of log(profile[k]) against k over the
/// offsets whose value exceeds floor_rel * profile[0].
double fitted_decay_rate(const std::vector<double>& profile, double floor_rel = 1e-13);

}  // namespace lyapband
