#include <doctest.h>

#include <set>

#include "lyapband/error.hpp"
#include "lyapband/models.hpp"
#include "lyapband/pattern.hpp"

using namespace lyapband;

namespace {

/// Structural pattern of A*S + S*A through dense boolean products.
SparsityPattern dense_structural_image(const SparsityPattern& a, const SparsityPattern& s) {
  const Index n = a.dim();
  std::vector<std::pair<Index, Index>> pairs;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      bool hit = false;
      for (Index k = 0; k < n && !hit; ++k) {
        hit = (a.contains(i, k) && s.contains(k, j)) || (s.contains(i, k) && a.contains(k, j));
      }
      if (hit) pairs.emplace_back(i, j);
    }
  }
  return SparsityPattern::from_pairs(n, pairs);
}

}  // namespace

TEST_CASE("banded_pattern") {
  CHECK(banded_pattern(5, 0).nnz() == 5);
  CHECK(banded_pattern(5, 8).nnz() == 25);
  CHECK(banded_pattern(4, 2).nnz() == 10);
  CHECK_THROWS_AS(banded_pattern(4, 3), Error);
}

TEST_CASE("predict_pattern") {
  const auto inst = gen_heat2d(4);
  CHECK(predict_pattern(inst.a, inst.p, 0) == inst.p.pattern());

  const auto one = predict_pattern(inst.a, inst.p, 1);
  const auto expected =
      SparsityPattern::unite(inst.p.pattern(), dense_structural_image(inst.a.pattern(), inst.p.pattern()));
  CHECK(one == expected);

  SparsityPattern prev = predict_pattern(inst.a, inst.p, 0);
  for (Index z = 1; z <= 4; ++z) {
    const auto next = predict_pattern(inst.a, inst.p, z);
    CHECK(prev.is_subset_of(next));
    CHECK(next.is_symmetric());
    prev = next;
  }

  const auto capped = predict_pattern(inst.a, inst.p, 3, Index{10});
  CHECK(capped.max_offset() <= 5);
  CHECK(capped.is_subset_of(predict_pattern(inst.a, inst.p, 3)));
  CHECK_THROWS_AS(predict_pattern(inst.a, gen_heat2d(5).p, 1), Error);
}

TEST_CASE("predicted 3D pattern is multi-banded") {
  const auto inst = gen_heat3d(30);
  const auto s = predict_pattern(inst.a, inst.p, 8);
  std::set<Index> offsets;
  for (Index i = 0; i < s.dim(); ++i) {
    for (Index j : s.row(i)) offsets.insert((i > j ? i - j : j - i) / kLocalOrder);
  }
  const Index max_block = *offsets.rbegin();
  MESSAGE("predicted pattern: nnz " << s.nnz() << ", max block offset " << max_block);
  // Bands cluster around multiples of N1 with gaps in between.
  CHECK(offsets.size() < max_block + 1);
  CHECK(max_block >= 30);
  CHECK(max_block <= 8 * 30 + 1);
  CHECK(offsets.count(30) == 1);
  CHECK(offsets.count(15) == 0);
  CHECK(s.nnz() < banded_pattern(s.dim(), s.bandwidth()).nnz());
}

TEST_CASE("row_reach") {
  const auto inst = gen_heat2d(4);
  const Index n = inst.a.dim();
  CHECK(row_reach(inst.a, SparsityPattern::full(n)) == SparsityPattern::full(n));

  const double d[] = {-1.0, -2.0, -3.0, -4.0};
  const auto diag = BandedMatrix::diagonal(d);
  const auto arbitrary = SparsityPattern::from_pairs(4, {{0, 3}, {3, 0}, {1, 2}, {2, 2}});
  CHECK(row_reach(diag, arbitrary) == arbitrary);

  const auto s = banded_pattern(n, 4);
  const auto r = row_reach(inst.a, s);
  CHECK(r == dense_structural_image(inst.a.pattern(), s));
  CHECK(s.is_subset_of(r));
  CHECK(r.nnz() >= s.nnz());
  CHECK(r.max_offset() == s.max_offset() + inst.a.max_offset());

  for (Index y : {0, 6, 20, 40}) {
    const auto sy = banded_pattern(gen_heat2d(10).a.dim(), y);
    const auto ry = row_reach(gen_heat2d(10).a, sy);
    CHECK(ry.nnz() >= sy.nnz());
    CHECK(ry.bandwidth() <= y + gen_heat2d(10).a.pattern().bandwidth());
  }
}
