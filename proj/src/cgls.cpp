#include "lyapband/cgls.hpp"

#include <chrono>
#include <cmath>

#include "lyapband/error.hpp"
#include "lyapband/pattern.hpp"

namespace lyapband {

namespace {

double sum_squares(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

// Values of p on the target pattern (zero where p is not structural).
std::vector<double> restrict_to(const BandedMatrix& p, const SparsityPattern& target) {
  const BandedMatrix e = pattern_project(p, target).embedded_in(target);
  return {e.values().begin(), e.values().end()};
}

}  // namespace

SparsityPattern build_pattern(const BandedMatrix& a, const BandedMatrix& p, const PatternSpec& spec) {
  if (const auto* b = std::get_if<BandedPatternSpec>(&spec)) {
    return banded_pattern(a.dim(), b->bandwidth);
  }
  if (const auto* z = std::get_if<PredictedPatternSpec>(&spec)) {
    return predict_pattern(a, p, z->levels, z->bandwidth_cap);
  }
  const auto& s = std::get<SparsityPattern>(spec);
  require_same_dim(a.dim(), s.dim(), "build_pattern");
  return s.symmetrized();
}

std::vector<double> lyap_op_restricted(const BandedMatrix& a, const SparsityPattern& source,
                                       std::span<const double> x, const SparsityPattern& target) {
  LyapunovKernel kernel(a.dim());
  std::vector<double> y(target.nnz());
  kernel.apply(a, source, x, target, y);
  return y;
}

std::vector<double> lyap_op_adjoint(const BandedMatrix& a, const SparsityPattern& reach,
                                    std::span<const double> y, const SparsityPattern& source) {
  return lyap_op_restricted(a, reach, y, source);
}

CglsResult cgls_solve(const BandedMatrix& a, const BandedMatrix& p, const CglsConfig& cfg) {
  require_same_dim(a.dim(), p.dim(), "cgls_solve");
  if (!a.symmetric() || !p.symmetric()) {
    fail(ErrorCode::not_symmetric, "cgls_solve: A and P must be symmetric");
  }
  if (!(cfg.eta_tol > 0.0) || cfg.max_iter < 1) {
    fail(ErrorCode::invalid_argument, "cgls_solve: need eta_tol > 0 and max_iter >= 1");
  }
  const auto start = std::chrono::steady_clock::now();
  const SparsityPattern s = build_pattern(a, p, cfg.pattern);
  const SparsityPattern r = row_reach(a, s);
  LyapunovKernel kernel(a.dim());

  std::vector<double> x(s.nnz(), 0.0);
  std::vector<double> res = restrict_to(p, r);  // r_0 = p|_R since x_0 = 0
  std::vector<double> grad(s.nnz());            // A~^T r
  std::vector<double> dir(s.nnz());
  std::vector<double> img(r.nnz());
  kernel.apply(a, r, res, s, grad);
  dir = grad;
  double gamma = sum_squares(grad);
  const double norm0 = std::sqrt(gamma);

  SolveReport rep;
  rep.method = "cgls";
  rep.parameters = {{"eta_tol", cfg.eta_tol}, {"max_iter", static_cast<double>(cfg.max_iter)}};
  rep.unknowns = s.nnz();
  rep.equations = r.nnz();
  rep.peak_nnz = a.nnz() + p.nnz() + 3 * s.nnz() + 2 * r.nnz();
  rep.stop_reason = "max_iter";

  if (norm0 == 0.0) {
    rep.converged = true;
    rep.stop_reason = "zero_rhs";
    rep.history.push_back(0.0);
  }
  for (int k = 0; k < cfg.max_iter && norm0 > 0.0; ++k) {
    kernel.apply(a, s, dir, r, img);
    const double qq = sum_squares(img);
    if (qq == 0.0 || gamma == 0.0) {
      rep.stop_reason = "breakdown";
      break;
    }
    const double alpha = gamma / qq;
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += alpha * dir[i];
    for (std::size_t i = 0; i < res.size(); ++i) res[i] -= alpha * img[i];
    kernel.apply(a, r, res, s, grad);
    const double gamma_next = sum_squares(grad);
    const double eta = std::sqrt(gamma_next) / norm0;
    rep.history.push_back(eta);
    rep.iterations = static_cast<std::size_t>(k + 1);
    if (eta <= cfg.eta_tol) {
      rep.converged = true;
      rep.stop_reason = "eta_tol";
      break;
    }
    const double beta = gamma_next / gamma;
    gamma = gamma_next;
    for (std::size_t i = 0; i < dir.size(); ++i) dir[i] = grad[i] + beta * dir[i];
  }

  BandedMatrix raw(s, std::move(x));
  const double asym = raw.max_asymmetry();
  rep.max_asymmetry = asym;
  CglsResult out{raw.symmetrized(), std::move(rep)};
  out.report.result_nnz = out.solution.nnz();
  out.report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace lyapband
