#include "lyapband/pattern.hpp"

#include "lyapband/error.hpp"

namespace lyapband {

namespace {

SparsityPattern lyapunov_reach(const SparsityPattern& ap, const SparsityPattern& s) {
  return SparsityPattern::unite(SparsityPattern::product(ap, s), SparsityPattern::product(s, ap));
}

}  // namespace

SparsityPattern banded_pattern(Index dim, Index y) {
  if (y % 2 != 0) fail(ErrorCode::invalid_argument, "banded_pattern: bandwidth must be even");
  return SparsityPattern::banded(dim, y / 2);
}

SparsityPattern row_reach(const BandedMatrix& a, const SparsityPattern& s) {
  require_same_dim(a.dim(), s.dim(), "row_reach");
  return lyapunov_reach(a.pattern(), s);
}

SparsityPattern predict_pattern(const BandedMatrix& a, const BandedMatrix& p, Index z1,
                                std::optional<Index> bandwidth_cap) {
  require_same_dim(a.dim(), p.dim(), "predict_pattern");
  if (bandwidth_cap && *bandwidth_cap % 2 != 0) {
    fail(ErrorCode::invalid_argument, "predict_pattern: bandwidth cap must be even");
  }
  const auto capped = [&](SparsityPattern s) {
    return bandwidth_cap ? s.restricted_to_band(*bandwidth_cap / 2) : s;
  };
  const SparsityPattern ap = a.pattern().symmetrized();
  SparsityPattern level = capped(p.pattern().symmetrized());
  SparsityPattern acc = level;
  for (Index l = 1; l <= z1; ++l) {
    SparsityPattern next = capped(lyapunov_reach(ap, level));
    if (next == level) break;  // fixed point: later levels repeat it
    level = std::move(next);
    acc = SparsityPattern::unite(acc, level);
  }
  return acc;
}

}  // namespace lyapband
