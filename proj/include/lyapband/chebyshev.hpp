#pragma once

#include <optional>
#include <vector>

#include "lyapband/banded_matrix.hpp"
#include "lyapband/spectral.hpp"

namespace lyapband {

/// Truncated Chebyshev series of exp(t A) on the spectral interval [a, b].
/// `degree` is the polynomial degree M; coeffs holds c_1..c_{M+1}.
struct ChebyshevApproximant {
  double t = 0.0;
  int degree = 0;
  std::vector<double> coeffs;
  int nodes = 0;  // R
  std::optional<Index> drop_bandwidth;
  int drop_period = 1;
  double tail_bound = 0.0;
};

inline constexpr int kTailExtraTerms = 512;

/// Default coefficient node count for a given degree: max(2(M+1), 64).
int default_cheb_nodes(int degree);

/// A1 = (2/(b-a)) A - ((a+b)/(b-a)) I, spectrum mapped into [-1, 1].
BandedMatrix shift_scale(const BandedMatrix& a, double lo, double hi);

/// c_k = (2/R) sum_j f(cos theta_j) cos((k-1) theta_j), theta_j = pi (j - 1/2) / R,
/// f(w) = exp((t/2)((b-a) w + a + b)), for k = 1..count.
std::vector<double> cheb_coeffs(double t, double lo, double hi, int count, int nodes);

/// sum of |c_k| for k > M+1, extended until |c_k| < 1e-16 or M+1+512 terms.
double cheb_tail_bound(double t, double lo, double hi, int degree);

/// T_1 = I, T_2 = A1, T_{k+1} = D(2 A1 T_k - T_{k-1}) for k = 2..count-1, with
/// D = band_project(., d) applied when k % drop_period == 0. Each T_k is
/// symmetrized. Throws ErrorCode::diverged when ||T_{k+1}||_F > 1e6 ||T_2||_F.
std::vector<BandedMatrix> cheb_polynomials(const BandedMatrix& a1, int count,
                                           std::optional<Index> drop_bandwidth, int drop_period);

/// (1/2) c_1 I + sum_{k>=2} c_k T_k, projected onto the drop bandwidth when set.
BandedMatrix cheb_combine(const std::vector<BandedMatrix>& polys, const std::vector<double>& coeffs,
                          std::optional<Index> drop_bandwidth);

struct ChebExpmResult {
  BandedMatrix value;
  ChebyshevApproximant approximant;
};

ChebExpmResult cheb_expm(const BandedMatrix& a, double t, const SpectralSummary& spec, int degree,
                         std::optional<int> nodes = std::nullopt,
                         std::optional<Index> drop_bandwidth = std::nullopt, int drop_period = 1);

}  // namespace lyapband
