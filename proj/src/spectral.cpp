#include "lyapband/spectral.hpp"

#include <cblas.h>
#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "lyapband/error.hpp"

namespace lyapband {

namespace {

double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) s += x[k] * y[k];
  return s;
}

struct RitzPair {
  double value;
  double residual;
};

// Extreme eigenpairs of the k x k Lanczos tridiagonal; residual = |beta_k * s_k|.
std::pair<RitzPair, RitzPair> ritz_extremes(const std::vector<double>& alpha,
                                            const std::vector<double>& beta, double beta_last) {
  const auto k = static_cast<lapack_int>(alpha.size());
  std::vector<double> d(alpha), e(beta.begin(), beta.begin() + (k - 1));
  std::vector<double> z(static_cast<std::size_t>(k) * k);
  e.resize(std::max<lapack_int>(k, 1));
  const lapack_int info = LAPACKE_dstev(LAPACK_COL_MAJOR, 'V', k, d.data(), e.data(), z.data(), k);
  if (info != 0) fail(ErrorCode::numerical, "lanczos: tridiagonal eigensolve failed");
  // Column c of z holds eigenvector c; its last component is z[(k-1) + c*k].
  const RitzPair lo{d.front(), std::abs(beta_last * z[static_cast<std::size_t>(k - 1)])};
  const RitzPair hi{d.back(),
                    std::abs(beta_last * z[static_cast<std::size_t>(k - 1) +
                                           static_cast<std::size_t>(k - 1) * k])};
  return {lo, hi};
}

}  // namespace

RitzExtremes lanczos_extremes(Index dim, const SymmetricOperator& op, double rel_tol,
                              int max_iter, bool need_lowest) {
  if (!(rel_tol > 0.0)) fail(ErrorCode::invalid_argument, "lanczos: rel_tol must be positive");
  RitzExtremes out;
  if (dim == 0) {
    out.converged = true;
    return out;
  }
  const int limit = static_cast<int>(std::min<Index>(dim, static_cast<Index>(std::max(max_iter, 1))));

  // Fixed-seed start vector keeps runs bit-reproducible.
  std::mt19937_64 rng(0x5eed1a2c05ULL);
  std::vector<std::vector<double>> basis;
  std::vector<double> v(dim), w(dim);
  for (double& x : v) x = static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5;
  double nv = std::sqrt(dot(v, v));
  for (double& x : v) x /= nv;

  std::vector<double> alpha, beta;
  for (int k = 0; k < limit; ++k) {
    basis.push_back(v);
    op(basis.back(), w);
    const double ak = dot(w, basis.back());
    alpha.push_back(ak);
    // Two passes of classical Gram-Schmidt against the whole basis.
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : basis) {
        const double c = dot(w, q);
        for (Index i = 0; i < dim; ++i) w[i] -= c * q[i];
      }
    }
    const double bk = std::sqrt(dot(w, w));
    beta.push_back(bk);
    const int steps = k + 1;
    const bool invariant = bk <= 1e-14 * std::max(std::abs(ak), 1e-300) || steps == static_cast<int>(dim);
    if (invariant || steps % 4 == 0 || steps == limit) {
      const auto [lo, hi] = ritz_extremes(alpha, beta, invariant ? 0.0 : bk);
      out.lowest = lo.value;
      out.highest = hi.value;
      out.iterations = steps;
      const bool lo_ok = lo.residual <= rel_tol * std::abs(lo.value) || lo.residual == 0.0;
      const bool hi_ok = hi.residual <= rel_tol * std::abs(hi.value) || hi.residual == 0.0;
      if (invariant || ((lo_ok || !need_lowest) && hi_ok)) {
        out.converged = true;
        return out;
      }
    }
    if (invariant) break;
    for (Index i = 0; i < dim; ++i) v[i] = w[i] / bk;
  }
  return out;
}

void band_matvec(const BandedMatrix& x, std::span<const double> in, std::span<double> out) {
  for (Index i = 0; i < x.dim(); ++i) {
    const auto c = x.pattern().row(i);
    const auto v = x.row_values(i);
    double s = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) s += v[k] * in[c[k]];
    out[i] = s;
  }
}

SpectralSummary extreme_eigs(const BandedMatrix& a, double rel_tol, int max_iter) {
  if (!a.symmetric()) fail(ErrorCode::not_symmetric, "extreme_eigs: A must be symmetric");
  const auto r = lanczos_extremes(
      a.dim(), [&](std::span<const double> x, std::span<double> y) { band_matvec(a, x, y); },
      rel_tol, max_iter);
  SpectralSummary s;
  s.a = r.lowest;
  s.b = r.highest;
  s.kappa = s.b != 0.0 ? s.a / s.b : 0.0;
  s.rel_tol = rel_tol;
  s.iterations = r.iterations;
  s.converged = r.converged;
  return s;
}

double norm2_est(const BandedMatrix& x, double rel_tol) {
  const Index n = x.dim();
  if (n == 0) return 0.0;
  const BandedMatrix xt = x.transposed();
  std::vector<double> tmp(n);
  const auto r = lanczos_extremes(
      n,
      [&](std::span<const double> in, std::span<double> out) {
        band_matvec(x, in, tmp);
        band_matvec(xt, tmp, out);
      },
      rel_tol, 600, false);
  return std::sqrt(std::max(r.highest, 0.0));
}

double norm2_est(const DenseMatrix& x, double rel_tol) {
  const Index n = x.dim();
  if (n == 0) return 0.0;
  const auto ni = static_cast<blasint>(n);
  ensure_dense_kernels();
  std::vector<double> tmp(n);
  const auto r = lanczos_extremes(
      n,
      [&](std::span<const double> in, std::span<double> out) {
        cblas_dgemv(CblasRowMajor, CblasNoTrans, ni, ni, 1.0, x.data(), ni, in.data(), 1, 0.0,
                    tmp.data(), 1);
        cblas_dgemv(CblasRowMajor, CblasTrans, ni, ni, 1.0, x.data(), ni, tmp.data(), 1, 0.0,
                    out.data(), 1);
      },
      rel_tol, 600, false);
  return std::sqrt(std::max(r.highest, 0.0));
}

SpectralInterval enclosing_interval(const SpectralSummary& spec) {
  const double tol = std::clamp(spec.rel_tol, 0.0, 0.5);
  return {spec.a - tol * std::abs(spec.a), spec.b + tol * std::abs(spec.b)};
}

}  // namespace lyapband
