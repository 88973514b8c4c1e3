#pragma once

#include <span>
#include <utility>
#include <variant>

#include "lyapband/banded_matrix.hpp"
#include "lyapband/report.hpp"

namespace lyapband {

struct BandedPatternSpec {
  Index bandwidth = 20;  // y, even
};
struct PredictedPatternSpec {
  Index levels = 1;  // z1
  std::optional<Index> bandwidth_cap;
};
using PatternSpec = std::variant<BandedPatternSpec, PredictedPatternSpec, SparsityPattern>;

SparsityPattern build_pattern(const BandedMatrix& a, const BandedMatrix& p, const PatternSpec& spec);

struct CglsConfig {
  double eta_tol = 1e-6;
  int max_iter = 5000;
  PatternSpec pattern = BandedPatternSpec{};
};

/// Y = A X + X A from values on `source` to values on `target`.
/// Used as the restricted operator (S -> R).
std::vector<double> lyap_op_restricted(const BandedMatrix& a, const SparsityPattern& source,
                                       std::span<const double> x, const SparsityPattern& target);

/// Adjoint of the restricted operator (R -> S); for symmetric A this is the
/// same Lyapunov map with source and target exchanged.
std::vector<double> lyap_op_adjoint(const BandedMatrix& a, const SparsityPattern& reach,
                                    std::span<const double> y, const SparsityPattern& source);

struct CglsResult {
  BandedMatrix solution;
  SolveReport report;
};

/// CGLS on min || P|_R - (A X + X A)|_R ||_2 over X supported on the pattern,
/// zero initial guess; eta_k = ||A~^T r_k|| / ||A~^T r_0||.
CglsResult cgls_solve(const BandedMatrix& a, const BandedMatrix& p, const CglsConfig& cfg);

}  // namespace lyapband
