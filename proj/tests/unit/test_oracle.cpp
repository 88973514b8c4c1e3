#include <doctest.h>

#include <cmath>
#include <random>

#include "../support.hpp"
#include "lyapband/error.hpp"
#include "lyapband/models.hpp"
#include "lyapband/oracle.hpp"

using namespace lyapband;
using lyapband::testing::rel_frobenius_diff;
using lyapband::testing::uniform;

namespace {

DenseMatrix diag(std::initializer_list<double> d) {
  DenseMatrix m(d.size());
  Index i = 0;
  for (double v : d) {
    m(i, i) = v;
    ++i;
  }
  return m;
}

DenseMatrix scaled_identity(Index n, double s) {
  DenseMatrix m(n);
  for (Index i = 0; i < n; ++i) m(i, i) = s;
  return m;
}

}  // namespace

TEST_CASE("dense_lyap closed forms") {
  const auto x = dense_lyap(scaled_identity(5, -1.0), scaled_identity(5, -2.0));
  CHECK(max_abs_diff(x, DenseMatrix::identity(5)) < 1e-15);

  const auto inst = gen_heat2d(6);
  const double gamma = -0.7;
  const auto y = dense_lyap(inst.a, inst.a.scaled(gamma));
  CHECK(max_abs_diff(y, scaled_identity(inst.a.dim(), gamma / 2)) < 1e-13);
}

TEST_CASE("dense_lyap residuals on the heat model") {
  for (Index n : {2, 12, 50}) {
    const auto inst = gen_heat2d(n);
    const auto x = dense_lyap(inst.a, inst.p);
    CHECK(lyap_relative_residual(inst.a, inst.p, x) <= 1e-10);
    CHECK(x.max_asymmetry() == 0.0);
  }
  // Diagonally dominant, oscillating solution.
  const auto inst = gen_heat2d(12);
  const auto x = dense_lyap(inst.a, inst.p);
  for (Index i = 0; i < x.dim(); ++i) CHECK(x(i, i) > 0.0);
}

TEST_CASE("dense_lyap rejects bad input") {
  DenseMatrix nonsym(2);
  nonsym(0, 0) = -1.0;
  nonsym(0, 1) = 0.5;
  nonsym(1, 1) = -1.0;
  CHECK_THROWS_AS(dense_lyap(nonsym, DenseMatrix::identity(2)), Error);
  CHECK_THROWS_AS(dense_lyap(diag({1.0, -1.0}), DenseMatrix::identity(2)), Error);
}

TEST_CASE("eigendecomposition is orthogonal") {
  const auto eig = symmetric_eigen(DenseMatrix::from_banded(gen_heat2d(40).a));
  CHECK(orthogonality_defect(eig) <= 1e-10);
}

TEST_CASE("dense_expm") {
  CHECK(max_abs_diff(dense_expm(diag({-1.0, -2.0}), 0.0), DenseMatrix::identity(2)) < 1e-15);
  const auto e = dense_expm(diag({-1.0, -2.0}), 1.0);
  CHECK(e(0, 0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(e(1, 1) == doctest::Approx(std::exp(-2.0)).epsilon(1e-15));
  CHECK(e(0, 1) == 0.0);

  const DenseMatrix a = DenseMatrix::from_banded(gen_heat2d(20).a);
  const auto e1 = dense_expm(a, 1.0);
  const auto e2 = dense_expm(a, 2.0);
  CHECK(max_abs_diff(dense_mul(e1, e1), e2) < 1e-10);

  // d/dt exp(tA) = A exp(tA), central difference.
  const double h = 1e-5;
  const auto deriv = dense_add(dense_expm(a, 1.0 + h), dense_expm(a, 1.0 - h), 0.5 / h, -0.5 / h);
  CHECK(rel_frobenius_diff(deriv, dense_mul(a, e1)) < 1e-8);
  CHECK_THROWS_AS(dense_expm(DenseMatrix(2, {0.0, 1.0, 0.0, 0.0}), 1.0), Error);
}

TEST_CASE("kron_assemble") {
  const double d[] = {-1.5, -3.0};
  const auto k = kron_assemble(BandedMatrix::diagonal(d));
  CHECK(max_abs_diff(k, diag({-3.0, -4.5, -4.5, -6.0})) == 0.0);

  std::mt19937_64 rng(53);
  const auto a = lyapband::testing::random_banded(5, 2, rng, true);
  DenseMatrix x(5);
  for (Index i = 0; i < 5; ++i) {
    for (Index j = 0; j < 5; ++j) x(i, j) = uniform(rng);
  }
  const DenseMatrix ad = DenseMatrix::from_banded(a);
  const auto image = dense_add(dense_mul(ad, x), dense_mul(x, ad));
  const auto kron = kron_assemble(a);
  for (Index row = 0; row < 25; ++row) {
    double acc = 0.0;
    for (Index c = 0; c < 25; ++c) acc += kron(row, c) * x(c % 5, c / 5);
    CHECK(acc == doctest::Approx(image(row % 5, row / 5)).epsilon(1e-13));
  }
  CHECK_THROWS_AS(kron_assemble(gen_heat2d(13).a), Error);
}

TEST_CASE("integral representation cross-check") {
  const auto inst = gen_heat2d(2);
  const DenseMatrix a = DenseMatrix::from_banded(inst.a);
  const DenseMatrix p = DenseMatrix::from_banded(inst.p);
  const double horizon = 40.0 / std::abs(inst.spectrum->b);
  const int steps = 4000;
  const double dt = horizon / steps;
  DenseMatrix integral(a.dim());
  for (int k = 0; k <= steps; ++k) {
    const auto e = dense_expm(a, k * dt);
    // Composite Simpson weights.
    const double w = (k == 0 || k == steps) ? dt / 3.0 : (k % 2 ? 4.0 * dt / 3.0 : 2.0 * dt / 3.0);
    integral = dense_add(integral, dense_mul(dense_mul(e, p), e), 1.0, -w);
  }
  CHECK(rel_frobenius_diff(integral, dense_lyap(a, p)) < 1e-6);
}

TEST_CASE("accuracy metric") {
  const auto inst = gen_heat2d(8);
  const auto truth = dense_lyap(inst.a, inst.p);
  CHECK(accuracy(truth, truth) == 0.0);
  CHECK(accuracy(dense_add(truth, truth), truth) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(accuracy(truth.to_banded().scaled(3.0), truth) == doctest::Approx(2.0).epsilon(1e-8));
  CHECK_THROWS_AS(accuracy(truth, DenseMatrix(truth.dim())), Error);
}
