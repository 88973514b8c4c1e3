#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "lyapband/banded_matrix.hpp"
#include "lyapband/spectral.hpp"

namespace lyapband {

inline constexpr Index kLocalOrder = 6;
inline constexpr double kHeatDiagonal = -1.36;
inline constexpr double kHeatCoupling = 0.34;
/// Dimension up to which generated models verify stability with extreme_eigs.
inline constexpr Index kStabilityCheckMaxDim = 4096;

struct ProblemInstance {
  BandedMatrix a;
  BandedMatrix p;
  Index subsystems = 0;  // N
  Index local_order = kLocalOrder;
  std::string label;
  std::uint64_t seed = 0;
  double margin = 0.0;  // random model only
  /// Filled by the stability check (dim <= kStabilityCheckMaxDim).
  std::optional<SpectralSummary> spectrum;
};

/// Block tridiagonal model with 6x6 tridiagonal diagonal blocks (diagonal,
/// coupling) and coupling * I off-diagonal blocks.
ProblemInstance gen_heat2d(Index n_sub, double diagonal = kHeatDiagonal,
                           double coupling = kHeatCoupling);

/// Coupling value for which gen_heat2d(n_sub, diagonal, .) has condition
/// number kappa (closed form of its spectrum).
double heat2d_coupling_for_kappa(Index n_sub, double kappa, double diagonal = kHeatDiagonal);

/// Closed-form extreme eigenvalues of gen_heat2d.
SpectralSummary heat2d_spectrum(Index n_sub, double diagonal = kHeatDiagonal,
                                double coupling = kHeatCoupling);

/// 7-point stencil on an N1 x N1 x 6 grid; subsystem (ix, iy) -> ix*N1 + iy.
ProblemInstance gen_heat3d(Index n1, double coupling = kHeatCoupling);

/// Symmetrized random block tridiagonal matrix shifted to lambda_max = -margin.
/// margin <= 0 selects 0.05 * |mean diagonal| of the symmetrized draw.
ProblemInstance gen_random_stable(Index n_sub, std::uint64_t seed, double margin = 0.0);

/// Margin for which gen_random_stable(n_sub, seed, .) reaches condition number kappa.
double random_margin_for_kappa(Index n_sub, std::uint64_t seed, double kappa);

/// Right-hand side shared by all models.
BandedMatrix model_rhs(Index n_sub);

}  // namespace lyapband
