#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "../support.hpp"
#include "lyapband/error.hpp"
#include "lyapband/models.hpp"
#include "lyapband/oracle.hpp"
#include "lyapband/pattern.hpp"
#include "lyapband/quadrature.hpp"

using namespace lyapband;
using lyapband::testing::random_banded;

TEST_CASE("quadrature rule") {
  const auto r1 = quad_rule(1, -1.0, 0.0);
  CHECK(r1.psi == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(r1.nodes.size() == 3);

  const int q = 30;
  const auto r = quad_rule(q, -0.5, 5e-4);
  REQUIRE(r.nodes.size() == 2 * q + 1);
  CHECK(r.psi == doctest::Approx(3.0 / (2.0 * std::abs(-0.5 + 5e-4))));
  const auto& mid = r.nodes[q];
  CHECK(mid.j == 0);
  CHECK(mid.weight == doctest::Approx(1.0 / std::sqrt(2.0 * q)).epsilon(1e-15));
  CHECK(mid.time == doctest::Approx(std::log(1.0 + std::sqrt(2.0))).epsilon(1e-15));
  for (std::size_t k = 0; k < r.nodes.size(); ++k) {
    const auto& n = r.nodes[k];
    CHECK(std::isfinite(n.weight));
    CHECK(std::isfinite(n.time));
    CHECK(n.weight > 0.0);
    CHECK(n.time >= 0.0);
    if (k > 0) {
      CHECK(n.time > r.nodes[k - 1].time);
      CHECK(n.weight > r.nodes[k - 1].weight);
    }
    // Extended-precision evaluation of the textbook formulas.
    const long double x = static_cast<long double>(n.j) / std::sqrt(static_cast<long double>(q));
    const long double e = std::exp(x);
    const long double t_ref = std::log(e + std::sqrt(1.0L + e * e));
    const long double w_ref = 1.0L / std::sqrt(q + q * std::exp(-2.0L * x));
    CHECK(std::abs(n.time - static_cast<double>(t_ref)) <= 4e-15 * static_cast<double>(t_ref));
    CHECK(std::abs(n.weight - static_cast<double>(w_ref)) <= 4e-15 * static_cast<double>(w_ref));
  }

  // Large |j| stays finite.
  const auto big = quad_rule(2000, -1.0, 0.0);
  for (const auto& n : big.nodes) {
    CHECK(std::isfinite(n.time));
    CHECK(std::isfinite(n.weight));
  }
  CHECK_THROWS_AS(quad_rule(0, -1.0, 0.0), Error);
  CHECK_THROWS_AS(quad_rule(3, 0.5, 0.0), Error);
}

TEST_CASE("quadrature error decreases with q") {
  const auto inst = gen_heat2d(50);
  const auto truth = dense_lyap(inst.a, inst.p);
  const auto spec = *inst.spectrum;
  ChebSettings cheb;
  cheb.degree = 40;
  double prev = 1e300;
  for (int q : {3, 10, 30}) {
    const auto rule = quad_rule(q, spec.b, 1e-3 * std::abs(spec.b));
    const auto x1 = quad_lyap(inst.a, inst.p, rule, cheb, spec);
    CHECK(x1.value.symmetric());
    CHECK(x1.node_approximants.size() == rule.nodes.size());
    const double eps = accuracy(x1.value, truth);
    MESSAGE("q = " << q << ": eps = " << eps);
    CHECK(eps < prev);
    prev = eps;
  }
}

TEST_CASE("quadrature with dropping stays within 2d + l") {
  const auto inst = gen_heat2d(40);
  const auto spec = *inst.spectrum;
  ChebSettings cheb;
  cheb.degree = 12;
  cheb.drop_bandwidth = 30;
  const auto x1 = quad_lyap(inst.a, inst.p, quad_rule(6, spec.b, 0.0), cheb, spec);
  CHECK(x1.value.pattern().bandwidth() <= 2 * 30 + inst.p.pattern().bandwidth());
}

TEST_CASE("gp_residual") {
  const auto inst = gen_heat2d(12);
  const auto truth = dense_lyap(inst.a, inst.p).to_banded();
  const auto r = gp_residual(inst.a, inst.p, truth);
  CHECK(r.frobenius_norm() <= 1e-8 * inst.p.frobenius_norm());

  const auto zero = BandedMatrix::zeros(SparsityPattern::banded(inst.a.dim(), 3), true);
  const auto rp = gp_residual(inst.a, inst.p, zero);
  for (Index i = 0; i < inst.a.dim(); ++i) {
    for (Index j : inst.p.pattern().row(i)) CHECK(rp.at(i, j) == inst.p.at(i, j));
  }

  std::mt19937_64 rng(43);
  const auto a = random_banded(10, 2, rng, true);
  const auto p = random_banded(10, 1, rng, true);
  const auto x = random_banded(10, 4, rng);
  const auto got = gp_residual(a, p, x).to_dense();
  const auto ax = lyapband::testing::naive_mul(a.to_dense(), x.to_dense(), 10);
  const auto xa = lyapband::testing::naive_mul(x.to_dense(), a.to_dense(), 10);
  const auto pd = p.to_dense();
  for (std::size_t k = 0; k < got.size(); ++k) CHECK(got[k] == doctest::Approx(pd[k] - ax[k] - xa[k]));
}

TEST_CASE("gp_gradient") {
  std::mt19937_64 rng(47);
  const auto a = random_banded(8, 2, rng, true);
  const auto zero_r = BandedMatrix::zeros(SparsityPattern::banded(8, 2), true);
  const auto zero_g = gp_gradient(a, zero_r);
  for (double v : zero_g.values()) CHECK(v == 0.0);

  const std::vector<double> minus_one(8, -1.0);
  const auto neg = BandedMatrix::diagonal(minus_one);
  const auto r = random_banded(8, 3, rng);
  const auto g = gp_gradient(neg, r);
  for (Index i = 0; i < 8; ++i) {
    for (Index j = 0; j < 8; ++j) CHECK(g.at(i, j) == doctest::Approx(4.0 * r.at(i, j)));
  }

  for (int trial = 0; trial < 20; ++trial) {
    const Index dim = 6 + rng() % 19;
    const auto at = random_banded(dim, 1 + rng() % 3, rng, true);
    const auto pt = random_banded(dim, 1 + rng() % 3, rng, true);
    const auto xt = random_banded(dim, rng() % 5, rng);
    const auto et = random_banded(dim, rng() % 5, rng);
    const auto grad = gp_gradient(at, gp_residual(at, pt, xt));
    const double h = 1e-6;
    const double fp = gp_objective(at, pt, band_add(xt, et, 1.0, h));
    const double fm = gp_objective(at, pt, band_add(xt, et, 1.0, -h));
    const double fd = (fp - fm) / (2.0 * h);
    const double exact = frobenius_inner(grad, et);
    CHECK(std::abs(fd - exact) <= 1e-5 * std::abs(exact));
  }
}

TEST_CASE("gradient projection from the exact solution stays there") {
  const auto inst = gen_heat2d(8);
  const auto truth = dense_lyap(inst.a, inst.p).to_banded();
  GpConfig cfg;
  cfg.feasible = SparsityPattern::full(inst.a.dim());
  const auto res = gp_refine(inst.a, inst.p, truth, cfg, inst.spectrum);
  CHECK(res.report.history.front() <= 1e-24);
  for (double f : res.report.history) CHECK(f <= res.report.history.front());
  CHECK(accuracy(res.solution, dense_lyap(inst.a, inst.p)) < 1e-12);
}

TEST_CASE("gradient projection descent, feasibility and symmetry") {
  const auto inst = gen_heat2d(30);
  const auto spec = *inst.spectrum;
  ChebSettings cheb;
  cheb.degree = 12;
  cheb.drop_bandwidth = 40;
  const auto x1 = quad_lyap(inst.a, inst.p, quad_rule(8, spec.b, 1e-3 * std::abs(spec.b)), cheb, spec).value;
  for (const auto& feasible : {std::variant<std::monostate, Index, SparsityPattern>(Index{60}),
                               std::variant<std::monostate, Index, SparsityPattern>(
                                   predict_pattern(inst.a, inst.p, 3))}) {
    GpConfig cfg;
    cfg.feasible = feasible;
    cfg.max_iter = 40;
    const auto res = gp_refine(inst.a, inst.p, x1, cfg, spec);
    const auto& h = res.report.history;
    REQUIRE(h.size() >= 2);
    for (std::size_t k = 1; k < h.size(); ++k) CHECK(h[k] < h[k - 1]);
    CHECK(res.feasible_iterates);
    const SparsityPattern s = std::holds_alternative<Index>(feasible)
                                  ? SparsityPattern::banded(inst.a.dim(), std::get<Index>(feasible) / 2)
                                  : std::get<SparsityPattern>(feasible);
    CHECK(res.solution.pattern().is_subset_of(s));
    CHECK(*res.report.max_asymmetry == 0.0);
    CHECK(res.solution.symmetric());
  }
}

TEST_CASE("full-bandwidth refinement converges to the dense solution") {
  const auto inst = gen_heat2d(12);
  const auto truth = dense_lyap(inst.a, inst.p);
  ChebGpConfig cfg;
  cfg.q = 30;
  cfg.cheb.degree = 30;
  cfg.gp.max_iter = 500;
  cfg.gp.rel_decrease_tol = 0.0;
  const auto res = solve_cheb_gp(inst.a, inst.p, cfg, inst.spectrum);
  const double eps0 = accuracy(res.initial, truth);
  const double eps = accuracy(res.solution, truth);
  MESSAGE("N=12 full band: eps " << eps0 << " -> " << eps << " after " << res.report.iterations << " iterations");
  CHECK(eps < 0.25 * eps0);
}

TEST_CASE("cheb-gp report lists the parameters used") {
  const auto inst = gen_heat2d(20);
  ChebGpConfig cfg;
  cfg.q = 5;
  cfg.cheb.degree = 10;
  cfg.cheb.drop_bandwidth = 30;
  cfg.gp.max_iter = 5;
  const auto res = solve_cheb_gp(inst.a, inst.p, cfg);
  const auto& p = res.report.parameters;
  for (const char* key : {"q", "psi", "eps1", "cheb_degree", "cheb_nodes", "drop_bandwidth", "drop_period",
                          "spectral_tol", "sigma", "zeta", "delta_bar", "max_iter", "max_backtracks",
                          "rel_decrease_tol", "gp_bandwidth", "a", "b", "kappa"}) {
    CHECK_MESSAGE(p.count(key) == 1, key);
  }
  CHECK(p.at("gp_bandwidth") == 2 * 30 + inst.p.pattern().bandwidth());
  CHECK(p.at("cheb_nodes") == 64);
  CHECK(p.at("eps1") == doctest::Approx(1e-3 * std::abs(res.spectrum.b)));
  CHECK(p.at("delta_bar") == doctest::Approx(10.0 / (8.0 * res.spectrum.a * res.spectrum.a)));
  CHECK(res.report.method == "cheb-gp");
  CHECK(res.report.history.size() == res.report.iterations + 1);
}
