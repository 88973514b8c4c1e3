#include "lyapband/quadrature.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <string>

#include "lyapband/error.hpp"
#include "lyapband/pattern.hpp"

namespace lyapband {

namespace {

double sum_squares(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

// asinh(exp(x)) without overflow for large x.
double node_time(double x) {
  if (x > 30.0) return x + std::numbers::ln2;
  return std::asinh(std::exp(x));
}

// (q + q exp(-2x))^(-1/2) without overflow for very negative x.
double node_weight(double q, double x) {
  if (x >= 0.0) return 1.0 / std::sqrt(q * (1.0 + std::exp(-2.0 * x)));
  return std::exp(x) / std::sqrt(q * (std::exp(2.0 * x) + 1.0));
}

Index full_bandwidth(Index dim) { return dim == 0 ? 0 : 2 * (dim - 1); }

}  // namespace

QuadratureRule quad_rule(int q, double b, double eps1) {
  if (q < 1) fail(ErrorCode::invalid_argument, "quad_rule: q must be >= 1");
  if (!(b < 0.0)) fail(ErrorCode::invalid_argument, "quad_rule: b must be negative");
  if (!(eps1 >= 0.0)) fail(ErrorCode::invalid_argument, "quad_rule: eps1 must be non-negative");
  QuadratureRule rule;
  rule.q = q;
  rule.eps1 = eps1;
  rule.psi = 3.0 / (2.0 * std::abs(b + eps1));
  const double qd = static_cast<double>(q);
  const double h = 1.0 / std::sqrt(qd);
  for (int j = -q; j <= q; ++j) {
    const double x = static_cast<double>(j) * h;
    rule.nodes.push_back({j, node_weight(qd, x), node_time(x)});
  }
  return rule;
}

QuadLyapResult quad_lyap(const BandedMatrix& a, const BandedMatrix& p, const QuadratureRule& rule,
                         const ChebSettings& cheb, const SpectralSummary& spec) {
  require_same_dim(a.dim(), p.dim(), "quad_lyap");
  if (!a.symmetric() || !p.symmetric()) {
    fail(ErrorCode::not_symmetric, "quad_lyap: A and P must be symmetric");
  }
  if (cheb.degree < 2) fail(ErrorCode::invalid_argument, "quad_lyap: degree must be >= 2");
  const int r = cheb.nodes.value_or(default_cheb_nodes(cheb.degree));
  if (r < 2 * (cheb.degree + 1)) fail(ErrorCode::invalid_argument, "quad_lyap: R must be >= 2(M+1)");

  const SpectralInterval iv = enclosing_interval(spec);
  const BandedMatrix a1 = shift_scale(a, iv.lo, iv.hi);
  const auto polys = cheb_polynomials(a1, cheb.degree + 1, cheb.drop_bandwidth, cheb.drop_period);
  std::size_t poly_nnz = 0;
  for (const auto& t : polys) poly_nnz += t.nnz();

  QuadLyapResult out;
  out.value = BandedMatrix::zeros(SparsityPattern(a.dim()), true);
  for (const QuadNode& node : rule.nodes) {
    ChebyshevApproximant ap;
    ap.t = rule.psi * node.time;
    ap.degree = cheb.degree;
    ap.nodes = r;
    ap.drop_bandwidth = cheb.drop_bandwidth;
    ap.drop_period = cheb.drop_period;
    ap.coeffs = cheb_coeffs(ap.t, iv.lo, iv.hi, cheb.degree + 1, r);
    ap.tail_bound = cheb_tail_bound(ap.t, iv.lo, iv.hi, cheb.degree);
    BandedMatrix f = cheb_combine(polys, ap.coeffs, cheb.drop_bandwidth);
    BandedMatrix term = band_mul(band_mul(f, p), f).symmetrized();
    out.value = band_add(out.value, term, 1.0, -rule.psi * node.weight);
    out.peak_nnz = std::max(out.peak_nnz, poly_nnz + f.nnz() + term.nnz() + out.value.nnz());
    out.node_approximants.push_back(std::move(ap));
  }
  return out;
}

BandedMatrix gp_residual(const BandedMatrix& a, const BandedMatrix& p, const BandedMatrix& x) {
  require_same_dim(a.dim(), x.dim(), "gp_residual");
  require_same_dim(a.dim(), p.dim(), "gp_residual");
  return band_add(p, lyapunov_image(a, x), 1.0, -1.0);
}

BandedMatrix gp_gradient(const BandedMatrix& a, const BandedMatrix& r) {
  require_same_dim(a.dim(), r.dim(), "gp_gradient");
  const BandedMatrix at = a.transposed();
  // A^T R + R A = lyapunov_image(A^T, R) since (A^T)^T = A.
  return lyapunov_image(at, r).scaled(-2.0);
}

double gp_objective(const BandedMatrix& a, const BandedMatrix& p, const BandedMatrix& x) {
  const double n = gp_residual(a, p, x).frobenius_norm();
  return n * n;
}

GpResult gp_refine(const BandedMatrix& a, const BandedMatrix& p, const BandedMatrix& x0,
                   const GpConfig& cfg, const std::optional<SpectralSummary>& spec) {
  require_same_dim(a.dim(), p.dim(), "gp_refine");
  require_same_dim(a.dim(), x0.dim(), "gp_refine");
  if (!a.symmetric()) fail(ErrorCode::not_symmetric, "gp_refine: A must be symmetric");
  if (!(cfg.sigma > 0.0 && cfg.sigma < 1.0) || !(cfg.zeta > 0.0 && cfg.zeta < 1.0)) {
    fail(ErrorCode::invalid_argument, "gp_refine: sigma and zeta must lie in (0,1)");
  }
  if (cfg.max_iter < 0 || cfg.max_backtracks < 0) {
    fail(ErrorCode::invalid_argument, "gp_refine: iteration limits must be non-negative");
  }
  const auto start = std::chrono::steady_clock::now();

  SparsityPattern s;
  if (const auto* d1 = std::get_if<Index>(&cfg.feasible)) {
    s = banded_pattern(a.dim(), *d1);
  } else if (const auto* sp = std::get_if<SparsityPattern>(&cfg.feasible)) {
    require_same_dim(a.dim(), sp->dim(), "gp_refine");
    s = sp->symmetrized();
  } else {
    s = x0.pattern().symmetrized();
  }
  double delta_bar = 0.0;
  if (cfg.delta_bar) {
    delta_bar = *cfg.delta_bar;
  } else {
    const SpectralSummary sp = spec ? *spec : extreme_eigs(a);
    delta_bar = 10.0 / (8.0 * sp.a * sp.a);
  }
  if (!(delta_bar > 0.0)) fail(ErrorCode::invalid_argument, "gp_refine: delta_bar must be positive");

  // Residuals live on R = reach(S) + pattern(P); gradients are only needed on S.
  const SparsityPattern rp = SparsityPattern::unite(row_reach(a, s), p.pattern());
  const BandedMatrix p_on_r = pattern_project(p, rp).embedded_in(rp);
  LyapunovKernel kernel(a.dim());

  BandedMatrix start_x = pattern_project(x0, s).embedded_in(s);
  std::vector<double> x(start_x.values().begin(), start_x.values().end());
  std::vector<double> img(rp.nnz()), res(rp.nnz()), lg(rp.nnz()), trial(rp.nnz());
  std::vector<double> grad(s.nnz());

  const auto residual = [&]() {
    kernel.apply(a, s, x, rp, img);
    const auto pv = p_on_r.values();
    for (std::size_t i = 0; i < res.size(); ++i) res[i] = pv[i] - img[i];
    return sum_squares(res);
  };

  SolveReport rep;
  rep.method = "gradient_projection";
  rep.parameters = {{"sigma", cfg.sigma},
                    {"zeta", cfg.zeta},
                    {"delta_bar", delta_bar},
                    {"max_iter", static_cast<double>(cfg.max_iter)},
                    {"max_backtracks", static_cast<double>(cfg.max_backtracks)},
                    {"rel_decrease_tol", cfg.rel_decrease_tol},
                    {"gp_bandwidth", static_cast<double>(s.bandwidth())}};
  rep.unknowns = s.nnz();
  rep.equations = rp.nnz();
  rep.peak_nnz = a.nnz() + p_on_r.nnz() + 2 * s.nnz() + 4 * rp.nnz();
  rep.stop_reason = "max_iter";

  double f = residual();
  rep.history.push_back(f);
  for (int k = 0; k < cfg.max_iter; ++k) {
    if (f == 0.0) {
      rep.converged = true;
      rep.stop_reason = "zero_residual";
      break;
    }
    kernel.apply(a, rp, res, s, grad);
    for (double& g : grad) g *= -2.0;
    const double gg = sum_squares(grad);
    if (gg == 0.0) {
      rep.converged = true;
      rep.stop_reason = "zero_gradient";
      break;
    }
    kernel.apply(a, s, grad, rp, lg);  // residual(X - delta G) = res + delta * lg
    bool accepted = false;
    double delta = delta_bar;
    for (int h = 0; h <= cfg.max_backtracks; ++h, delta *= cfg.zeta) {
      for (std::size_t i = 0; i < res.size(); ++i) trial[i] = res[i] + delta * lg[i];
      const double f_trial = sum_squares(trial);
      if (f - f_trial >= cfg.sigma * delta * gg && f_trial < f) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      rep.stop_reason = "backtracking_exhausted";
      break;
    }
    for (std::size_t i = 0; i < x.size(); ++i) x[i] -= delta * grad[i];
    const double f_next = residual();
    rep.history.push_back(f_next);
    rep.iterations = static_cast<std::size_t>(k + 1);
    const double decrease = (f - f_next) / f;
    f = f_next;
    if (decrease < cfg.rel_decrease_tol) {
      rep.converged = true;
      rep.stop_reason = "rel_decrease";
      break;
    }
  }

  GpResult out;
  BandedMatrix raw(s, std::move(x));
  rep.max_asymmetry = raw.max_asymmetry();
  out.solution = raw.symmetrized();
  rep.result_nnz = out.solution.nnz();
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out.report = std::move(rep);
  out.feasible_iterates = out.solution.pattern().is_subset_of(s);
  return out;
}

ChebGpResult solve_cheb_gp(const BandedMatrix& a, const BandedMatrix& p, const ChebGpConfig& cfg,
                           const std::optional<SpectralSummary>& spec) {
  require_same_dim(a.dim(), p.dim(), "solve_cheb_gp");
  const auto start = std::chrono::steady_clock::now();
  ChebGpResult out;
  out.spectrum = spec ? *spec : extreme_eigs(a, cfg.spectral_tol);
  const double eps1 = cfg.eps1.value_or(1e-3 * std::abs(out.spectrum.b));
  out.rule = quad_rule(cfg.q, out.spectrum.b, eps1);
  QuadLyapResult quad = quad_lyap(a, p, out.rule, cfg.cheb, out.spectrum);
  out.initial = quad.value;
  out.node_approximants = std::move(quad.node_approximants);

  GpConfig gp = cfg.gp;
  if (std::holds_alternative<std::monostate>(gp.feasible)) {
    const Index l = p.pattern().bandwidth();
    gp.feasible = cfg.cheb.drop_bandwidth ? std::min(2 * *cfg.cheb.drop_bandwidth + l, full_bandwidth(a.dim()))
                                          : full_bandwidth(a.dim());
  }
  GpResult refined = gp_refine(a, p, out.initial, gp, out.spectrum);
  out.solution = std::move(refined.solution);
  out.report = std::move(refined.report);
  out.report.method = "cheb-gp";
  auto& prm = out.report.parameters;
  prm["q"] = cfg.q;
  prm["psi"] = out.rule.psi;
  prm["eps1"] = eps1;
  prm["cheb_degree"] = cfg.cheb.degree;
  prm["cheb_nodes"] = cfg.cheb.nodes.value_or(default_cheb_nodes(cfg.cheb.degree));
  prm["drop_bandwidth"] = cfg.cheb.drop_bandwidth ? static_cast<double>(*cfg.cheb.drop_bandwidth) : -1.0;
  prm["drop_period"] = cfg.cheb.drop_period;
  prm["spectral_tol"] = cfg.spectral_tol;
  prm["a"] = out.spectrum.a;
  prm["b"] = out.spectrum.b;
  prm["kappa"] = out.spectrum.kappa;
  out.report.peak_nnz = std::max(out.report.peak_nnz, quad.peak_nnz);
  out.report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace lyapband
