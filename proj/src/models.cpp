#include "lyapband/models.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "lyapband/error.hpp"

namespace lyapband {

namespace {

void require_subsystems(Index n, const char* op) {
  if (n < 2) fail(ErrorCode::invalid_argument, std::string(op) + ": need at least 2 subsystems");
}

void check_stable(ProblemInstance& inst) {
  if (inst.a.dim() > kStabilityCheckMaxDim) return;
  SpectralSummary s = extreme_eigs(inst.a, 1e-8);
  if (!(s.b < 0.0)) {
    fail(ErrorCode::numerical, inst.label + ": generated A is not asymptotically stable");
  }
  inst.spectrum = s;
}

// Symmetrized random block tridiagonal draw (before the shift).
BandedMatrix random_symmetric(Index n_sub, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Index n = n_sub * kLocalOrder;
  std::vector<Triplet> t;
  t.reserve(n_sub * 3 * kLocalOrder * kLocalOrder);
  for (Index bi = 0; bi < n_sub; ++bi) {
    for (Index bj = bi == 0 ? 0 : bi - 1; bj <= std::min(n_sub - 1, bi + 1); ++bj) {
      for (Index r = 0; r < kLocalOrder; ++r) {
        for (Index c = 0; c < kLocalOrder; ++c) {
          const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
          t.push_back({bi * kLocalOrder + r, bj * kLocalOrder + c, u});
        }
      }
    }
  }
  return BandedMatrix::from_triplets(n, std::move(t)).symmetrized();
}

}  // namespace

BandedMatrix model_rhs(Index n_sub) {
  const Index n = n_sub * kLocalOrder;
  std::vector<Triplet> t;
  for (Index bi = 0; bi < n_sub; ++bi) {
    for (Index bj = bi == 0 ? 0 : bi - 1; bj <= std::min(n_sub - 1, bi + 1); ++bj) {
      for (Index r = 0; r < kLocalOrder; ++r) {
        for (Index c = 0; c < kLocalOrder; ++c) {
          double v = -0.1;
          if (bi == bj) v = r == c ? -1.0 : -0.2;
          t.push_back({bi * kLocalOrder + r, bj * kLocalOrder + c, v});
        }
      }
    }
  }
  return BandedMatrix::from_triplets(n, std::move(t));
}

ProblemInstance gen_heat2d(Index n_sub, double diagonal, double coupling) {
  require_subsystems(n_sub, "gen_heat2d");
  const Index n = n_sub * kLocalOrder;
  std::vector<Triplet> t;
  for (Index i = 0; i < n; ++i) {
    const Index local = i % kLocalOrder;
    t.push_back({i, i, diagonal});
    if (local > 0) t.push_back({i, i - 1, coupling});
    if (local + 1 < kLocalOrder) t.push_back({i, i + 1, coupling});
    if (i >= kLocalOrder) t.push_back({i, i - kLocalOrder, coupling});
    if (i + kLocalOrder < n) t.push_back({i, i + kLocalOrder, coupling});
  }
  ProblemInstance inst;
  inst.a = BandedMatrix::from_triplets(n, std::move(t));
  inst.p = model_rhs(n_sub);
  inst.subsystems = n_sub;
  inst.label = "heat2d";
  check_stable(inst);
  return inst;
}

SpectralSummary heat2d_spectrum(Index n_sub, double diagonal, double coupling) {
  // A = I_N (x) T_6 + S_N (x) coupling*I with T_6 = tridiag(coupling, diagonal, coupling)
  // and S_N the path adjacency, so lambda = diagonal + 2 coupling (cos(pi i/7) + cos(pi j/(N+1))).
  const double c = std::cos(std::numbers::pi / static_cast<double>(kLocalOrder + 1)) +
                   std::cos(std::numbers::pi / static_cast<double>(n_sub + 1));
  SpectralSummary s;
  s.a = diagonal - 2.0 * std::abs(coupling) * c;
  s.b = diagonal + 2.0 * std::abs(coupling) * c;
  s.kappa = s.a / s.b;
  s.converged = true;
  return s;
}

double heat2d_coupling_for_kappa(Index n_sub, double kappa, double diagonal) {
  if (!(kappa >= 1.0) || !(diagonal < 0.0)) {
    fail(ErrorCode::invalid_argument, "heat2d_coupling_for_kappa: need kappa >= 1, diagonal < 0");
  }
  const double c = std::cos(std::numbers::pi / static_cast<double>(kLocalOrder + 1)) +
                   std::cos(std::numbers::pi / static_cast<double>(n_sub + 1));
  return std::abs(diagonal) * (kappa - 1.0) / (2.0 * c * (kappa + 1.0));
}

ProblemInstance gen_heat3d(Index n1, double coupling) {
  require_subsystems(n1, "gen_heat3d");
  const Index n_sub = n1 * n1;
  const Index n = n_sub * kLocalOrder;
  std::vector<Triplet> t;
  for (Index ix = 0; ix < n1; ++ix) {
    for (Index iy = 0; iy < n1; ++iy) {
      const Index s = ix * n1 + iy;
      // In-plane neighbours present for this column; the two z couplings
      // always count toward the diagonal (fixed-temperature lids).
      std::vector<Index> plane;
      if (ix > 0) plane.push_back(s - n1);
      if (iy > 0) plane.push_back(s - 1);
      if (iy + 1 < n1) plane.push_back(s + 1);
      if (ix + 1 < n1) plane.push_back(s + n1);
      const double diag = -static_cast<double>(plane.size() + 2) * coupling;
      for (Index z = 0; z < kLocalOrder; ++z) {
        const Index i = s * kLocalOrder + z;
        t.push_back({i, i, diag});
        if (z > 0) t.push_back({i, i - 1, coupling});
        if (z + 1 < kLocalOrder) t.push_back({i, i + 1, coupling});
        for (Index nb : plane) t.push_back({i, nb * kLocalOrder + z, coupling});
      }
    }
  }
  ProblemInstance inst;
  inst.a = BandedMatrix::from_triplets(n, std::move(t));
  inst.p = model_rhs(n_sub);
  inst.subsystems = n_sub;
  inst.label = "heat3d";
  check_stable(inst);
  return inst;
}

ProblemInstance gen_random_stable(Index n_sub, std::uint64_t seed, double margin) {
  require_subsystems(n_sub, "gen_random_stable");
  const BandedMatrix sym = random_symmetric(n_sub, seed);
  if (!(margin > 0.0)) {
    double mean = 0.0;
    for (Index i = 0; i < sym.dim(); ++i) mean += sym.at(i, i);
    mean /= static_cast<double>(sym.dim());
    margin = 0.05 * std::abs(mean);
  }
  const SpectralSummary raw = extreme_eigs(sym, 1e-12);
  const double nu = -raw.b - margin;
  ProblemInstance inst;
  inst.a = band_add(sym, BandedMatrix::identity(sym.dim()), 1.0, nu);
  inst.p = model_rhs(n_sub);
  inst.subsystems = n_sub;
  inst.label = "random";
  inst.seed = seed;
  inst.margin = margin;
  check_stable(inst);
  return inst;
}

double random_margin_for_kappa(Index n_sub, std::uint64_t seed, double kappa) {
  if (!(kappa > 1.0)) fail(ErrorCode::invalid_argument, "random_margin_for_kappa: kappa must exceed 1");
  const SpectralSummary raw = extreme_eigs(random_symmetric(n_sub, seed), 1e-12);
  // kappa = (spread + margin) / margin
  return (raw.b - raw.a) / (kappa - 1.0);
}

}  // namespace lyapband
