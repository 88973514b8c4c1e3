// Acceptance suite: one PASS/FAIL line per criterion. Pass criterion numbers
// as arguments to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lyapband/cgls.hpp"
#include "lyapband/chebyshev.hpp"
#include "lyapband/decay.hpp"
#include "lyapband/dense.hpp"
#include "lyapband/models.hpp"
#include "lyapband/oracle.hpp"
#include "lyapband/pattern.hpp"
#include "lyapband/quadrature.hpp"
#include "lyapband/spectral.hpp"
#include "support.hpp"

using namespace lyapband;
using lyapband::testing::random_banded;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [violated: " << what << "]";
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Gradient projection runs collected for the descent criterion.
struct GpRun {
  std::string label;
  std::vector<double> history;
  bool feasible = true;
};
std::vector<GpRun> g_gp_runs;

void record_gp(const std::string& label, const ChebGpResult& r) {
  g_gp_runs.push_back({label, r.report.history, r.solution.pattern().is_subset_of(
                                                    banded_pattern(r.solution.dim(),
                                                                   static_cast<Index>(r.report.parameters.at("gp_bandwidth"))))});
}

DenseMatrix scaled_identity(Index dim, double value) {
  DenseMatrix x(dim);
  for (Index i = 0; i < dim; ++i) x(i, i) = value;
  return x;
}

// Heat template with the coupling scaled to a target condition number.
ProblemInstance heat_with_kappa(Index n_sub, double kappa) {
  return gen_heat2d(n_sub, kHeatDiagonal, heat2d_coupling_for_kappa(n_sub, kappa));
}

double lsq_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sx += x[k];
    sy += y[k];
    sxx += x[k] * x[k];
    sxy += x[k] * y[k];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

void oracle_fidelity(Outcome& out) {
  for (Index n : {2, 12, 50}) {
    const auto inst = gen_heat2d(n);
    const DenseMatrix x = dense_lyap(inst.a, inst.p);
    const double r = lyap_relative_residual(inst.a, inst.p, x);
    out.detail << " N=" << n << " resid=" << r;
    out.check(r <= 1e-10, "residual at N=" + std::to_string(n));
  }
  const auto inst = gen_heat2d(2);
  const DenseMatrix a = DenseMatrix::from_banded(inst.a);
  const DenseMatrix p = DenseMatrix::from_banded(inst.p);
  const double horizon = 40.0 / std::abs(inst.spectrum->b);
  const int steps = 4000;
  const double dt = horizon / steps;
  DenseMatrix integral(a.dim());
  for (int k = 0; k <= steps; ++k) {
    const DenseMatrix e = dense_expm(a, k * dt);
    const double w = (k == 0 || k == steps) ? dt / 3.0 : (k % 2 ? 4.0 * dt / 3.0 : 2.0 * dt / 3.0);
    integral = dense_add(integral, dense_mul(dense_mul(e, p), e), 1.0, -w);
  }
  const double diff = testing::rel_frobenius_diff(integral, dense_lyap(a, p));
  out.detail << " integral(dim 12)=" << diff;
  out.check(diff <= 1e-4, "integral cross-check");
}

void closed_form(Outcome& out) {
  const auto inst = heat_with_kappa(10, 5.0);
  const double gamma = -2.0;
  const auto p = inst.a.scaled(gamma);
  const DenseMatrix truth = scaled_identity(inst.a.dim(), gamma / 2.0);

  CglsConfig cg;
  cg.eta_tol = 1e-10;
  cg.pattern = BandedPatternSpec{4};
  const auto r1 = cgls_solve(inst.a, p, cg);
  const double e1 = accuracy(r1.solution, truth);
  out.detail << " kappa=" << inst.spectrum->kappa << " cgls eps=" << e1;
  out.check(e1 <= 1e-6, "CGLS eps");

  ChebGpConfig gp;
  gp.q = 36;
  gp.cheb.degree = 60;
  const auto r2 = solve_cheb_gp(inst.a, p, gp, inst.spectrum);
  record_gp("closed form", r2);
  const double e2 = accuracy(r2.solution, truth);
  out.detail << " cheb-gp eps=" << e2 << " (before refinement " << accuracy(r2.initial, truth) << ")";
  out.check(e2 <= 1e-3, "Method 2 eps");
}

void kron_spectrum(Outcome& out) {
  std::vector<ProblemInstance> models = {gen_heat2d(2),          gen_heat2d(3),          gen_heat3d(2),
                                         gen_random_stable(2, 1), gen_random_stable(3, 2),
                                         gen_random_stable(3, 7, 0.5)};
  double worst = 0.0;
  for (const auto& m : models) {
    if (m.a.dim() > 20) continue;
    const auto ea = symmetric_eigen(DenseMatrix::from_banded(m.a));
    const auto ek = symmetric_eigen(kron_assemble(m.a));
    const double a = ea.values.front(), b = ea.values.back();
    const double lo = ek.values.front(), hi = ek.values.back();
    const double err = std::max(std::abs(lo - 2.0 * a) / std::abs(2.0 * a), std::abs(hi - 2.0 * b) / std::abs(2.0 * b));
    worst = std::max(worst, err);
    out.detail << " " << m.label << "(dim " << m.a.dim() << ")";
  }
  out.detail << " worst rel err=" << worst;
  out.check(worst <= 1e-10, "extremes equal 2a, 2b");
}

void adjoint_property(Outcome& out) {
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const Index dim = 4 + rng() % 57;
    const auto a = random_banded(dim, 1 + rng() % 4, rng, true);
    const auto s = banded_pattern(dim, 2 * (rng() % 8));
    const auto r = row_reach(a, s);
    std::vector<double> x(s.nnz()), y(r.nnz());
    for (double& v : x) v = testing::uniform(rng);
    for (double& v : y) v = testing::uniform(rng);
    const auto ax = lyap_op_restricted(a, s, x, r);
    const auto aty = lyap_op_adjoint(a, r, y, s);
    double lhs = 0.0, rhs = 0.0, nax = 0.0, ny = 0.0;
    for (std::size_t k = 0; k < y.size(); ++k) {
      lhs += ax[k] * y[k];
      nax += ax[k] * ax[k];
      ny += y[k] * y[k];
    }
    for (std::size_t k = 0; k < x.size(); ++k) rhs += x[k] * aty[k];
    worst = std::max(worst, std::abs(lhs - rhs) / (std::sqrt(nax) * std::sqrt(ny)));
  }
  out.detail << " 50 trials, worst rel gap=" << worst;
  out.check(worst <= 1e-12, "adjoint identity");
}

void chebyshev_accuracy(Outcome& out) {
  const auto inst = gen_heat2d(100);
  const auto r = cheb_expm(inst.a, 1.0, *inst.spectrum, 7);
  const DenseMatrix exact = dense_expm(DenseMatrix::from_banded(inst.a), 1.0);
  const double err = norm2_est(dense_add(r.value, exact, 1.0, -1.0), 1e-8);
  out.detail << " err=" << err << " tail bound=" << r.approximant.tail_bound;
  out.check(err >= 4.4e-8 && err <= 4.4e-6, "error within one order of 4.4e-7");
  out.check(r.approximant.tail_bound >= err, "tail bound dominates");
}

void cgls_counts(Outcome& out) {
  const auto inst = gen_heat2d(200);
  const double kappa = inst.spectrum->kappa;
  out.detail << " kappa=" << kappa;
  out.check(std::abs(kappa - 39.0) <= 0.05 * 39.0, "kappa 39 +- 5%");
  for (const auto& [y, ref] : {std::pair<Index, double>{20, 45.0}, {300, 235.0}}) {
    CglsConfig cfg;
    cfg.eta_tol = 1e-6;
    cfg.pattern = BandedPatternSpec{y};
    const auto r = cgls_solve(inst.a, inst.p, cfg);
    const double it = static_cast<double>(r.report.iterations);
    out.detail << " y=" << y << ": " << r.report.iterations << " it (ref " << ref << ")";
    out.check(r.report.converged && std::abs(it - ref) <= 0.3 * ref, "iterations at y=" + std::to_string(y));
  }
}

void bandwidth_monotonicity(Outcome& out) {
  const auto inst = gen_heat2d(200);
  const DenseMatrix truth = dense_lyap(inst.a, inst.p);
  double prev = -1.0;
  int violations = 0;
  for (Index y : {20, 60, 100, 200, 300}) {
    CglsConfig cfg;
    cfg.pattern = BandedPatternSpec{y};
    const double eps = accuracy(cgls_solve(inst.a, inst.p, cfg).solution, truth);
    out.detail << " y=" << y << ":" << eps;
    if (prev >= 0.0 && eps > prev) {
      ++violations;
      out.check(eps - prev <= 0.1 * eps, "increase beyond 10% at y=" + std::to_string(y));
    }
    prev = eps;
  }
  out.check(violations <= 1, "at most a single-step violation");
}

void quadrature_convergence(Outcome& out) {
  const auto inst = heat_with_kappa(10, 5.0);
  const double gamma = -2.0;
  const auto p = inst.a.scaled(gamma);
  const DenseMatrix truth = scaled_identity(inst.a.dim(), gamma / 2.0);
  ChebSettings cheb;
  cheb.degree = 60;
  std::vector<double> x, y;
  out.detail << " kappa=" << inst.spectrum->kappa;
  for (int q : {4, 9, 16, 25, 36}) {
    const auto rule = quad_rule(q, inst.spectrum->b, 1e-3 * std::abs(inst.spectrum->b));
    const double eps = accuracy(quad_lyap(inst.a, p, rule, cheb, *inst.spectrum).value, truth);
    x.push_back(std::sqrt(static_cast<double>(q)));
    y.push_back(std::log(eps));
    out.detail << " q=" << q << ":" << eps;
  }
  const double slope = lsq_slope(x, y);
  out.detail << " slope=" << slope;
  out.check(slope <= -0.5, "slope of log eps vs sqrt q");
}

void armijo_descent(Outcome& out) {
  // Additional runs on the default template and a predicted feasible set.
  {
    const auto inst = gen_heat2d(30);
    ChebGpConfig cfg;
    cfg.q = 10;
    cfg.cheb.degree = 20;
    cfg.cheb.drop_bandwidth = 30;
    record_gp("heat2d N=30 d=30", solve_cheb_gp(inst.a, inst.p, cfg, inst.spectrum));
    cfg.gp.feasible = predict_pattern(inst.a, inst.p, 4);
    const auto r = solve_cheb_gp(inst.a, inst.p, cfg, inst.spectrum);
    g_gp_runs.push_back({"heat2d N=30 predicted", r.report.history,
                         r.solution.pattern().is_subset_of(std::get<SparsityPattern>(cfg.gp.feasible))});
  }
  {
    const auto inst = gen_random_stable(12, 3);
    ChebGpConfig cfg;
    cfg.q = 8;
    cfg.cheb.degree = 16;
    record_gp("random N=12", solve_cheb_gp(inst.a, inst.p, cfg));
  }
  std::size_t steps = 0;
  for (const auto& run : g_gp_runs) {
    for (std::size_t k = 1; k < run.history.size(); ++k) {
      ++steps;
      out.check(run.history[k] < run.history[k - 1], run.label + " step " + std::to_string(k));
    }
    out.check(run.feasible, run.label + " feasibility");
  }
  out.detail << " " << g_gp_runs.size() << " runs, " << steps << " accepted steps";

  std::mt19937_64 rng(99);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const Index dim = 5 + rng() % 16;
    const auto a = random_banded(dim, 1 + rng() % 3, rng, true);
    const auto p = random_banded(dim, 1 + rng() % 3, rng, true);
    const auto x = random_banded(dim, rng() % 4, rng);
    const auto e = random_banded(dim, rng() % 4, rng);
    const auto g = gp_gradient(a, gp_residual(a, p, x));
    const double h = 1e-6;
    const double fd = (gp_objective(a, p, band_add(x, e, 1.0, h)) - gp_objective(a, p, band_add(x, e, 1.0, -h))) /
                      (2.0 * h);
    const double exact = frobenius_inner(g, e);
    worst = std::max(worst, std::abs(fd - exact) / std::abs(exact));
  }
  out.detail << "; gradient vs finite differences worst rel=" << worst;
  out.check(worst <= 1e-5, "gradient check");
}

void bound_validity(Outcome& out) {
  for (const auto& [n, samples] : {std::pair<Index, Index>{4, 0}, {30, 1000}}) {
    const auto inst = gen_heat2d(n);
    const DenseMatrix x = dense_lyap(inst.a, inst.p);
    const Index dim = inst.a.dim();
    const DecayEstimate est = decay_kron(*inst.spectrum, inst.a.pattern().bandwidth(), dim);
    std::vector<Index> positions;
    if (samples == 0) {
      for (Index s = 1; s <= dim * dim; ++s) positions.push_back(s);
    } else {
      std::mt19937_64 rng(7);
      std::uniform_int_distribution<Index> pick(1, dim * dim);
      for (Index k = 0; k < samples; ++k) positions.push_back(pick(rng));
    }
    std::size_t violations = 0;
    for (Index s : positions) {
      if (std::abs(x((s - 1) % dim, (s - 1) / dim)) > entrywise_bound(inst.p, est, s)) ++violations;
    }
    out.detail << " N=" << n << ": " << positions.size() << " positions, " << violations << " violations";
    out.check(violations == 0, "bound at N=" + std::to_string(n));
  }
}

void decay_conditioning(Outcome& out) {
  double rates[2];
  int k = 0;
  for (double kappa : {5.0, 50.0}) {
    const auto inst = heat_with_kappa(30, kappa);
    const auto p = BandedMatrix::identity(inst.a.dim()).scaled(-1.0);
    rates[k++] = fitted_decay_rate(empirical_decay(dense_lyap(inst.a, p)));
    out.detail << " kappa=" << inst.spectrum->kappa << ": rate=" << rates[k - 1];
  }
  out.check(rates[0] < rates[1], "faster decay for smaller kappa");
}

void end_to_end(Outcome& out) {
  const auto inst = gen_heat2d(600);
  auto start = std::chrono::steady_clock::now();
  const DenseMatrix truth = dense_lyap(inst.a, inst.p);
  out.detail << " oracle " << seconds_since(start) << "s;";
  CglsConfig cg;
  cg.eta_tol = 1e-6;
  cg.pattern = BandedPatternSpec{150};
  start = std::chrono::steady_clock::now();
  const auto r1 = cgls_solve(inst.a, inst.p, cg);
  const double e1 = accuracy(r1.solution, truth);
  out.detail << " cgls y=150 eps=" << e1 << " (" << r1.report.iterations << " it, " << seconds_since(start) << "s)";
  out.check(e1 <= 0.05, "CGLS eps");

  ChebGpConfig gp;
  gp.q = 60;
  gp.cheb.degree = 20;
  gp.cheb.drop_bandwidth = 150;
  gp.gp.max_iter = 50;
  start = std::chrono::steady_clock::now();
  const auto r2 = solve_cheb_gp(inst.a, inst.p, gp, inst.spectrum);
  record_gp("heat2d N=600", r2);
  const double e2 = accuracy(r2.solution, truth);
  out.detail << " cheb-gp d=150 eps=" << e2 << " (before refinement " << accuracy(r2.initial, truth) << ", "
             << seconds_since(start) << "s)";
  out.check(e2 <= 0.05, "Method 2 eps");
}

void scaling_trend(Outcome& out) {
  const auto timed = [](const std::function<void()>& f) {
    // Best of two to damp scheduler noise.
    double best = 1e300;
    for (int rep = 0; rep < 2; ++rep) {
      const auto start = std::chrono::steady_clock::now();
      f();
      best = std::min(best, seconds_since(start));
    }
    return best;
  };
  std::vector<double> t_cgls, t_gp;
  for (Index n : {200, 400, 800}) {
    const auto inst = gen_heat2d(n);
    CglsConfig cg;
    cg.pattern = BandedPatternSpec{150};
    t_cgls.push_back(timed([&] { cgls_solve(inst.a, inst.p, cg); }));
    ChebGpConfig gp;
    gp.q = 30;
    gp.cheb.degree = 20;
    gp.cheb.drop_bandwidth = 150;
    gp.gp.max_iter = 20;
    t_gp.push_back(timed([&] { solve_cheb_gp(inst.a, inst.p, gp); }));
    out.detail << " N=" << n << ": cgls " << t_cgls.back() << "s, cheb-gp " << t_gp.back() << "s;";
  }
  for (const auto* t : {&t_cgls, &t_gp}) {
    const char* name = t == &t_cgls ? "cgls" : "cheb-gp";
    const double r1 = (*t)[1] / (*t)[0], r2 = (*t)[2] / (*t)[1];
    out.detail << " " << name << " ratios " << r1 << ", " << r2;
    out.check(r1 <= 3.0 && r2 <= 3.0, std::string(name) + " ratio");
  }
}

void pattern_advantage(Outcome& out) {
  const auto inst = gen_heat3d(10);
  const DenseMatrix truth = dense_lyap(inst.a, inst.p);
  CglsConfig cfg;
  cfg.pattern = PredictedPatternSpec{8, std::nullopt};
  const auto pred = build_pattern(inst.a, inst.p, cfg.pattern);
  const double e_pred = accuracy(cgls_solve(inst.a, inst.p, cfg).solution, truth);
  Index y = 0;
  while (banded_count(inst.a.dim(), y / 2) < pred.nnz()) y += 2;
  cfg.pattern = BandedPatternSpec{y};
  const double e_band = accuracy(cgls_solve(inst.a, inst.p, cfg).solution, truth);
  out.detail << " predicted z1=8: nnz=" << pred.nnz() << " eps=" << e_pred << "; banded y=" << y
             << ": nnz=" << banded_count(inst.a.dim(), y / 2) << " eps=" << e_band;
  out.check(e_pred <= e_band, "predicted no worse than banded");

  // Informational: at N1 = 10 eight levels fill most of the grid; a larger grid
  // shows the comparison before saturation.
  const auto big = gen_heat3d(20);
  const DenseMatrix big_truth = dense_lyap(big.a, big.p);
  cfg.pattern = PredictedPatternSpec{8, std::nullopt};
  const auto big_pred = build_pattern(big.a, big.p, cfg.pattern);
  const double b_pred = accuracy(cgls_solve(big.a, big.p, cfg).solution, big_truth);
  y = 0;
  while (banded_count(big.a.dim(), y / 2) < big_pred.nnz()) y += 2;
  cfg.pattern = BandedPatternSpec{y};
  const double b_band = accuracy(cgls_solve(big.a, big.p, cfg).solution, big_truth);
  out.detail << "; fill " << 100.0 * static_cast<double>(pred.nnz()) / static_cast<double>(inst.a.dim() * inst.a.dim())
             << "%; not asserted, N1=20: fill "
             << 100.0 * static_cast<double>(big_pred.nnz()) / static_cast<double>(big.a.dim() * big.a.dim())
             << "%, predicted eps=" << b_pred << " vs banded y=" << y << " eps=" << b_band;
}

void determinism(Outcome& out) {
  const auto same = [](const BandedMatrix& x, const BandedMatrix& y) {
    return x.pattern() == y.pattern() &&
           std::memcmp(x.values().data(), y.values().data(), x.nnz() * sizeof(double)) == 0;
  };
  const auto inst = gen_heat2d(40);
  CglsConfig cg;
  cg.pattern = PredictedPatternSpec{6, std::nullopt};
  const auto c1 = cgls_solve(inst.a, inst.p, cg);
  const auto c2 = cgls_solve(inst.a, inst.p, cg);
  out.check(same(c1.solution, c2.solution) && c1.report.history == c2.report.history, "cgls");
  const auto rnd = gen_random_stable(20, 11);
  ChebGpConfig gp;
  gp.q = 12;
  gp.cheb.degree = 20;
  gp.cheb.drop_bandwidth = 40;
  const auto g1 = solve_cheb_gp(rnd.a, rnd.p, gp);
  const auto g2 = solve_cheb_gp(rnd.a, rnd.p, gp);
  out.check(same(g1.solution, g2.solution) && g1.report.history == g2.report.history, "cheb-gp");
  out.detail << " cgls " << c1.report.iterations << " it, cheb-gp " << g1.report.iterations
             << " it: bit-identical solutions and histories";
}

}  // namespace

int main(int argc, char** argv) {
  ensure_dense_kernels();
  const std::vector<std::pair<const char*, void (*)(Outcome&)>> criteria = {
      {"oracle fidelity", oracle_fidelity},
      {"closed-form solution", closed_form},
      {"Kronecker spectrum", kron_spectrum},
      {"adjoint property", adjoint_property},
      {"Chebyshev accuracy", chebyshev_accuracy},
      {"CGLS iteration counts", cgls_counts},
      {"accuracy-bandwidth monotonicity", bandwidth_monotonicity},
      {"quadrature convergence", quadrature_convergence},
      {"Armijo descent", armijo_descent},
      {"entrywise bound validity", bound_validity},
      {"decay-conditioning link", decay_conditioning},
      {"end-to-end accuracy", end_to_end},
      {"scaling trend", scaling_trend},
      {"pattern advantage", pattern_advantage},
      {"determinism", determinism},
  };
  std::set<int> selected;
  for (int k = 1; k < argc; ++k) selected.insert(std::atoi(argv[k]));
  // Descent is judged over every gradient projection run, so its producers go first.
  std::vector<int> order;
  for (int k = 1; k <= static_cast<int>(criteria.size()); ++k) {
    if (k != 9) order.push_back(k);
  }
  order.push_back(9);

  int failed = 0;
  for (int k : order) {
    if (!selected.empty() && !selected.count(k)) continue;
    Outcome out;
    const auto start = std::chrono::steady_clock::now();
    try {
      criteria[k - 1].second(out);
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail << " [exception: " << e.what() << "]";
    }
    if (!out.pass) ++failed;
    char head[96];
    std::snprintf(head, sizeof head, "AC %2d %s %s (%.1fs):", k, out.pass ? "PASS" : "FAIL", criteria[k - 1].first,
                  seconds_since(start));
    std::printf("%s%s\n", head, out.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
