#include "lyapband/chebyshev.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "lyapband/error.hpp"

namespace lyapband {

namespace {

void check_interval(double lo, double hi, const char* op) {
  if (!(lo < hi)) fail(ErrorCode::invalid_argument, std::string(op) + ": need a < b");
}

}  // namespace

int default_cheb_nodes(int degree) { return std::max(2 * (degree + 1), 64); }

BandedMatrix shift_scale(const BandedMatrix& a, double lo, double hi) {
  check_interval(lo, hi, "shift_scale");
  const double scale = 2.0 / (hi - lo);
  const double shift = -(lo + hi) / (hi - lo);
  return band_add(a, BandedMatrix::identity(a.dim()), scale, shift);
}

std::vector<double> cheb_coeffs(double t, double lo, double hi, int count, int nodes) {
  check_interval(lo, hi, "cheb_coeffs");
  if (count < 1 || nodes < 1) fail(ErrorCode::invalid_argument, "cheb_coeffs: need count, R >= 1");
  if (t < 0.0) fail(ErrorCode::invalid_argument, "cheb_coeffs: t must be non-negative");
  std::vector<double> c(static_cast<std::size_t>(count), 0.0);
  const double r = static_cast<double>(nodes);
  for (int j = 1; j <= nodes; ++j) {
    const double w = std::cos(std::numbers::pi * (static_cast<double>(j) - 0.5) / r);
    const double f = std::exp(0.5 * t * ((hi - lo) * w + lo + hi));
    // cos((k-1) theta) = T_{k-1}(w) by the three-term recurrence.
    double prev = 1.0;
    double cur = w;
    c[0] += f;
    if (count > 1) c[1] += f * w;
    for (int k = 2; k < count; ++k) {
      const double next = 2.0 * w * cur - prev;
      prev = cur;
      cur = next;
      c[static_cast<std::size_t>(k)] += f * cur;
    }
  }
  for (double& v : c) v *= 2.0 / r;
  return c;
}

double cheb_tail_bound(double t, double lo, double hi, int degree) {
  const int first = degree + 2;  // 1-based index of the first dropped coefficient
  const int last = degree + 1 + kTailExtraTerms;
  const std::vector<double> c = cheb_coeffs(t, lo, hi, last, default_cheb_nodes(last));
  double tail = 0.0;
  for (int k = first; k <= last; ++k) {
    const double v = std::abs(c[static_cast<std::size_t>(k - 1)]);
    tail += v;
    if (v < 1e-16) break;
  }
  return tail;
}

std::vector<BandedMatrix> cheb_polynomials(const BandedMatrix& a1, int count,
                                           std::optional<Index> drop_bandwidth, int drop_period) {
  if (count < 1) fail(ErrorCode::invalid_argument, "cheb_polynomials: count must be positive");
  if (drop_period < 1) fail(ErrorCode::invalid_argument, "cheb_polynomials: drop_period must be >= 1");
  if (drop_bandwidth && *drop_bandwidth % 2 != 0) {
    fail(ErrorCode::invalid_argument, "cheb_polynomials: drop bandwidth must be even");
  }
  std::vector<BandedMatrix> t;
  t.reserve(static_cast<std::size_t>(count));
  t.push_back(BandedMatrix::identity(a1.dim()));
  if (count == 1) return t;
  t.push_back(a1.symmetrized());
  const double limit = 1e6 * t[1].frobenius_norm();
  for (int k = 2; k < count; ++k) {
    BandedMatrix next = band_add(band_mul(a1, t[static_cast<std::size_t>(k - 1)]),
                                 t[static_cast<std::size_t>(k - 2)], 2.0, -1.0);
    if (drop_bandwidth && k % drop_period == 0) next = band_project(next, *drop_bandwidth);
    next = next.symmetrized();
    if (!(next.frobenius_norm() <= limit)) {
      fail(ErrorCode::diverged, "dropped recurrence diverged at step " + std::to_string(k + 1));
    }
    t.push_back(std::move(next));
  }
  return t;
}

BandedMatrix cheb_combine(const std::vector<BandedMatrix>& polys, const std::vector<double>& coeffs,
                          std::optional<Index> drop_bandwidth) {
  if (polys.empty() || coeffs.size() > polys.size()) {
    fail(ErrorCode::invalid_argument, "cheb_combine: more coefficients than polynomials");
  }
  BandedMatrix acc = polys[0].scaled(0.5 * coeffs[0]);
  for (std::size_t k = 1; k < coeffs.size(); ++k) acc = band_add(acc, polys[k], 1.0, coeffs[k]);
  if (drop_bandwidth) acc = band_project(acc, *drop_bandwidth);
  return acc.symmetrized();
}

ChebExpmResult cheb_expm(const BandedMatrix& a, double t, const SpectralSummary& spec, int degree,
                         std::optional<int> nodes, std::optional<Index> drop_bandwidth,
                         int drop_period) {
  if (!a.symmetric()) fail(ErrorCode::not_symmetric, "cheb_expm: A must be symmetric");
  if (degree < 2) fail(ErrorCode::invalid_argument, "cheb_expm: degree must be >= 2");
  const int r = nodes.value_or(default_cheb_nodes(degree));
  if (r < 2 * (degree + 1)) {
    fail(ErrorCode::invalid_argument, "cheb_expm: R must be at least 2(M+1)");
  }
  const SpectralInterval iv = enclosing_interval(spec);
  ChebyshevApproximant ap;
  ap.t = t;
  ap.degree = degree;
  ap.nodes = r;
  ap.drop_bandwidth = drop_bandwidth;
  ap.drop_period = drop_period;
  ap.coeffs = cheb_coeffs(t, iv.lo, iv.hi, degree + 1, r);
  ap.tail_bound = cheb_tail_bound(t, iv.lo, iv.hi, degree);
  const BandedMatrix a1 = shift_scale(a, iv.lo, iv.hi);
  const auto polys = cheb_polynomials(a1, degree + 1, drop_bandwidth, drop_period);
  return {cheb_combine(polys, ap.coeffs, drop_bandwidth), std::move(ap)};
}

}  // namespace lyapband
