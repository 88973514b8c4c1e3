#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "lyapband/banded_matrix.hpp"
#include "lyapband/chebyshev.hpp"
#include "lyapband/report.hpp"
#include "lyapband/spectral.hpp"

namespace lyapband {

struct QuadNode {
  int j = 0;
  double weight = 0.0;  // omega_j
  double time = 0.0;    // t_j
};

/// psi = 3 / (2 |b + eps1|), omega_j = (q + q exp(-2 j / sqrt(q)))^(-1/2),
/// t_j = asinh(exp(j / sqrt(q))) for j = -q..q.
struct QuadratureRule {
  int q = 0;
  double psi = 0.0;
  double eps1 = 0.0;
  std::vector<QuadNode> nodes;
};

QuadratureRule quad_rule(int q, double b, double eps1);

struct ChebSettings {
  int degree = 20;
  std::optional<int> nodes;             // R, default max(2(M+1), 64)
  std::optional<Index> drop_bandwidth;  // d
  int drop_period = 1;
};

struct QuadLyapResult {
  BandedMatrix value;
  std::vector<ChebyshevApproximant> node_approximants;  // ascending j
  std::size_t peak_nnz = 0;
};

/// X1 = -sum_j psi omega_j F_j P F_j with F_j ~ exp(psi t_j A). The Chebyshev
/// polynomials of the scaled matrix are shared across nodes; only the
/// coefficients depend on the node. Summation runs over ascending j.
QuadLyapResult quad_lyap(const BandedMatrix& a, const BandedMatrix& p, const QuadratureRule& rule,
                         const ChebSettings& cheb, const SpectralSummary& spec);

/// P - A X - X A^T.
BandedMatrix gp_residual(const BandedMatrix& a, const BandedMatrix& p, const BandedMatrix& x);
/// -2 A^T R - 2 R A, the gradient of ||P - A X - X A^T||_F^2.
BandedMatrix gp_gradient(const BandedMatrix& a, const BandedMatrix& r);
/// ||P - A X - X A^T||_F^2.
double gp_objective(const BandedMatrix& a, const BandedMatrix& p, const BandedMatrix& x);

struct GpConfig {
  /// Feasible set: an even bandwidth d1 or an explicit pattern. Left empty,
  /// gp_refine keeps the pattern of X0 and solve_cheb_gp picks its default.
  std::variant<std::monostate, Index, SparsityPattern> feasible;
  double sigma = 1e-4;
  double zeta = 0.5;
  std::optional<double> delta_bar;  // default 10 / (8 a^2)
  int max_iter = 50;
  int max_backtracks = 40;
  double rel_decrease_tol = 1e-12;
};

struct GpResult {
  BandedMatrix solution;
  SolveReport report;
  /// Whether every iterate stayed inside the feasible pattern.
  bool feasible_iterates = true;
};

/// Gradient projection with the Armijo rule along the projection arc:
/// X_{k+1} = D1(X_k - delta_k G_k), delta_k = zeta^h delta_bar with the first h
/// such that F1(X_k) - F1(X_k(delta)) >= sigma <G_k, X_k - X_k(delta)>.
/// `spec` supplies a for the default delta_bar.
GpResult gp_refine(const BandedMatrix& a, const BandedMatrix& p, const BandedMatrix& x0,
                   const GpConfig& cfg, const std::optional<SpectralSummary>& spec = std::nullopt);

struct ChebGpConfig {
  int q = 30;
  std::optional<double> eps1;  // default 1e-3 |b|
  ChebSettings cheb;
  /// Default feasible set: bandwidth d1 = 2 d + l (l = bandwidth of P), or the
  /// full bandwidth without dropping.
  GpConfig gp;
  double spectral_tol = kDefaultSpectralTol;
};

struct ChebGpResult {
  BandedMatrix solution;
  BandedMatrix initial;  // X1 before refinement
  QuadratureRule rule;
  SpectralSummary spectrum;
  std::vector<ChebyshevApproximant> node_approximants;
  SolveReport report;
};

ChebGpResult solve_cheb_gp(const BandedMatrix& a, const BandedMatrix& p, const ChebGpConfig& cfg,
                           const std::optional<SpectralSummary>& spec = std::nullopt);

}  // namespace lyapband
