#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "lyapband/banded_matrix.hpp"
#include "lyapband/dense.hpp"

namespace lyapband::testing {

inline double uniform(std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

/// Random matrix on banded(half) with every entry structural.
inline BandedMatrix random_banded(Index dim, Index half, std::mt19937_64& rng, bool symmetric = false) {
  std::vector<Triplet> t;
  for (Index i = 0; i < dim; ++i) {
    for (Index j = 0; j < dim; ++j) {
      const Index off = i > j ? i - j : j - i;
      if (off > half || (symmetric && j < i)) continue;
      const double v = uniform(rng);
      t.push_back({i, j, v});
      if (symmetric && j != i) t.push_back({j, i, v});
    }
  }
  return BandedMatrix::from_triplets(dim, std::move(t));
}

/// Row-major triple-loop product, ascending inner index.
inline std::vector<double> naive_mul(const std::vector<double>& x, const std::vector<double>& y, Index n) {
  std::vector<double> z(n * n, 0.0);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      double s = 0.0;
      for (Index k = 0; k < n; ++k) s += x[i * n + k] * y[k * n + j];
      z[i * n + j] = s;
    }
  }
  return z;
}

inline double dense_frobenius(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

inline double rel_frobenius_diff(const DenseMatrix& x, const DenseMatrix& y) {
  return dense_add(x, y, 1.0, -1.0).frobenius_norm() / y.frobenius_norm();
}

}  // namespace lyapband::testing
