#include "lyapband/decay.hpp"

#include <algorithm>
#include <cmath>

#include "lyapband/error.hpp"

namespace lyapband {

namespace {

double k1_constant(const SpectralSummary& spec) {
  const double kappa = spec.kappa;
  const double sk = std::sqrt(kappa);
  return (1.0 / std::abs(spec.b)) * std::max(1.0, (1.0 + sk) * (1.0 + sk) / (2.0 * kappa));
}

double decay_base(double kappa) {
  const double sk = std::sqrt(kappa);
  return (sk - 1.0) / (sk + 1.0);
}

void check_spec(const SpectralSummary& spec, const char* op) {
  if (!(spec.b < 0.0) || !(spec.kappa >= 1.0)) {
    fail(ErrorCode::invalid_argument, std::string(op) + ": need b < 0 and kappa >= 1");
  }
}

}  // namespace

DecayEstimate decay_diagP(double gamma, const SpectralSummary& spec, Index m) {
  check_spec(spec, "decay_diagP");
  if (!(gamma < 0.0)) fail(ErrorCode::invalid_argument, "decay_diagP: gamma must be negative");
  if (m < 1) fail(ErrorCode::invalid_argument, "decay_diagP: bandwidth must be >= 1");
  DecayEstimate e;
  e.context = DecayContext::diagonal_rhs;
  e.k1 = k1_constant(spec);
  e.tau = 0.5 * std::abs(gamma) * e.k1;
  e.rho = std::pow(decay_base(spec.kappa), 2.0 / static_cast<double>(m));
  return e;
}

DecayEstimate decay_kron(const SpectralSummary& spec, Index m, Index dim) {
  check_spec(spec, "decay_kron");
  if (m < 1 || dim < 1) fail(ErrorCode::invalid_argument, "decay_kron: bandwidth and dim must be >= 1");
  DecayEstimate e;
  e.context = DecayContext::kron_inverse;
  e.k1 = k1_constant(spec);
  e.tau = 0.5 * e.k1;
  e.rho = std::pow(decay_base(spec.kappa), 2.0 / (static_cast<double>(dim) * static_cast<double>(m)));
  return e;
}

double entrywise_bound(const BandedMatrix& p, const DecayEstimate& est, Index s) {
  const Index n = p.dim();
  if (s < 1 || s > n * n) fail(ErrorCode::invalid_argument, "entrywise_bound: s out of range");
  double sum = 0.0;
  for (Index i = 0; i < n; ++i) {
    const auto c = p.pattern().row(i);
    const auto v = p.row_values(i);
    for (std::size_t k = 0; k < c.size(); ++k) {
      const Index phi = c[k] * n + i + 1;
      const Index dist = phi > s ? phi - s : s - phi;
      sum += std::abs(v[k]) * std::pow(est.rho, static_cast<double>(dist));
    }
  }
  return est.tau * sum;
}

std::vector<double> empirical_decay(const DenseMatrix& x) {
  const Index n = x.dim();
  std::vector<double> prof(n, 0.0);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      const Index k = i > j ? i - j : j - i;
      prof[k] = std::max(prof[k], std::abs(x(i, j)));
    }
  }
  return prof;
}

std::vector<double> empirical_decay(const BandedMatrix& x) {
  std::vector<double> prof(x.dim(), 0.0);
  for (const auto& t : x.triplets()) {
    const Index k = t.row > t.col ? t.row - t.col : t.col - t.row;
    prof[k] = std::max(prof[k], std::abs(t.value));
  }
  return prof;
}

std::vector<double> row_profile(const DenseMatrix& x, Index row) {
  if (row >= x.dim()) fail(ErrorCode::invalid_argument, "row_profile: row out of range");
  std::vector<double> out(x.dim());
  for (Index j = 0; j < x.dim(); ++j) out[j] = std::abs(x(row, j));
  return out;
}

double fitted_decay_rate(const std::vector<double>& profile, double floor_rel) {
  if (profile.empty() || !(profile[0] > 0.0)) {
    fail(ErrorCode::invalid_argument, "fitted_decay_rate: profile must start with a positive value");
  }
  const double floor = floor_rel * profile[0];
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  double count = 0.0;
  for (std::size_t k = 0; k < profile.size(); ++k) {
    if (!(profile[k] > floor)) continue;
    const double xk = static_cast<double>(k);
    const double yk = std::log(profile[k]);
    sx += xk;
    sy += yk;
    sxx += xk * xk;
    sxy += xk * yk;
    count += 1.0;
  }
  if (count < 2.0) return 0.0;
  const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  return std::exp(slope);
}

}  // namespace lyapband
