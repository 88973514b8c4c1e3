#include <doctest.h>

#include <cmath>
#include <cstring>
#include <set>

#include "lyapband/error.hpp"
#include "lyapband/models.hpp"
#include "lyapband/spectral.hpp"

using namespace lyapband;

namespace {

std::set<Index> block_offsets(const BandedMatrix& a) {
  std::set<Index> out;
  for (Index i = 0; i < a.dim(); ++i) {
    for (Index j : a.pattern().row(i)) {
      const Index bi = i / kLocalOrder;
      const Index bj = j / kLocalOrder;
      out.insert(bi > bj ? bi - bj : bj - bi);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("heat2d structure and values") {
  const auto inst = gen_heat2d(10);
  CHECK(inst.a.dim() == 60);
  CHECK(inst.p.dim() == 60);
  CHECK(inst.a.symmetric());
  CHECK(inst.p.symmetric());
  CHECK(block_offsets(inst.a) == std::set<Index>{0, 1});
  // 10 tridiagonal 6x6 blocks (16 entries) plus 18 diagonal coupling blocks.
  CHECK(inst.a.nnz() == 10 * 16 + 18 * 6);
  // Coupling blocks are e*I, so the largest offset of A is 6; P has dense
  // blocks and reaches 11.
  CHECK(inst.a.max_offset() == 6);
  CHECK(inst.p.max_offset() == 11);

  const auto small = gen_heat2d(2);
  CHECK(small.a.dim() == 12);
  CHECK(small.a.at(0, 0) == -1.36);
  CHECK(small.a.at(0, 1) == 0.34);
  CHECK(small.a.at(0, 6) == 0.34);
  CHECK(small.a.at(0, 7) == 0.0);
  CHECK(small.p.at(0, 0) == -1.0);
  CHECK(small.p.at(0, 3) == -0.2);
  CHECK(small.p.at(0, 6) == -0.1);
  CHECK(small.p.at(2, 11) == -0.1);
  CHECK_THROWS_AS(gen_heat2d(1), Error);
}

TEST_CASE("heat2d closed-form spectrum and kappa targeting") {
  const auto inst = gen_heat2d(40);
  REQUIRE(inst.spectrum.has_value());
  const auto exact = heat2d_spectrum(40);
  CHECK(inst.spectrum->a == doctest::Approx(exact.a).epsilon(1e-8));
  CHECK(inst.spectrum->b == doctest::Approx(exact.b).epsilon(1e-8));
  for (double kappa : {1.5, 5.0, 50.0}) {
    const double e = heat2d_coupling_for_kappa(40, kappa);
    const auto s = extreme_eigs(gen_heat2d(40, kHeatDiagonal, e).a, 1e-10);
    CHECK(s.kappa == doctest::Approx(kappa).epsilon(1e-7));
  }
}

TEST_CASE("heat3d structure") {
  const auto inst = gen_heat3d(5);
  CHECK(inst.subsystems == 25);
  CHECK(inst.a.dim() == 150);
  CHECK(inst.a.symmetric());
  CHECK(block_offsets(inst.a) == std::set<Index>{0, 1, 5});
  CHECK(inst.a.max_offset() == 6 * 5);
  // Corner column (0,0) has 2 in-plane neighbours, interior (2,2) has 4.
  CHECK(inst.a.at(0, 0) == doctest::Approx(-4 * 0.34));
  const Index interior = (2 * 5 + 2) * kLocalOrder;
  CHECK(inst.a.at(interior, interior) == doctest::Approx(-6 * 0.34));
  CHECK(3.4e-7 / (0.001 * 0.001) == doctest::Approx(kHeatCoupling));
  CHECK(inst.p.pattern() == gen_heat2d(25).p.pattern());
  CHECK_THROWS_AS(gen_heat3d(1), Error);
}

TEST_CASE("heat3d N1 = 30 condition number (reported)") {
  const auto inst = gen_heat3d(30);
  CHECK(inst.a.dim() == 5400);
  const auto s = extreme_eigs(inst.a, 1e-8);
  MESSAGE("heat3d N1=30 kappa = " << s.kappa << " (reference value 72)");
  CHECK(s.converged);
  CHECK(s.kappa > 1.0);
  CHECK(s.b < 0.0);
}

TEST_CASE("random stable model") {
  const auto x = gen_random_stable(12, 5);
  const auto y = gen_random_stable(12, 5);
  REQUIRE(x.a.nnz() == y.a.nnz());
  CHECK(x.a.pattern() == y.a.pattern());
  CHECK(std::memcmp(x.a.values().data(), y.a.values().data(), x.a.nnz() * sizeof(double)) == 0);
  CHECK(x.a.symmetric());
  CHECK(x.margin > 0.0);
  const auto s = extreme_eigs(x.a, 1e-10);
  CHECK(s.b == doctest::Approx(-x.margin).epsilon(1e-8));

  const auto other = gen_random_stable(12, 6);
  CHECK(other.a.at(0, 0) != x.a.at(0, 0));

  const double margin = random_margin_for_kappa(30, 1, 52.0);
  const auto w = gen_random_stable(30, 1, margin);
  CHECK(extreme_eigs(w.a, 1e-10).kappa == doctest::Approx(52.0).epsilon(1e-6));
  CHECK(w.a.max_offset() <= 11);
}

TEST_CASE("model right-hand side is negative definite") {
  const auto p = model_rhs(20);
  const auto s = extreme_eigs(p, 1e-10);
  CHECK(s.b < 0.0);
}
