#include "lyapband/lyapband.h"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <random>
#include <sstream>
#include <string>

#include "lyapband/bench.hpp"
#include "lyapband/chebyshev.hpp"
#include "lyapband/decay.hpp"
#include "lyapband/dense.hpp"
#include "lyapband/error.hpp"
#include "lyapband/mm_io.hpp"
#include "lyapband/oracle.hpp"
#include "lyapband/pattern.hpp"
#include "lyapband/spectral.hpp"
#include "lyapband/version.hpp"

using namespace lyapband;

struct lb_matrix {
  BandedMatrix value;
};

struct lb_pattern {
  SparsityPattern value;
};

namespace {

thread_local std::string last_error;

lb_status set_error(lb_status code, const std::string& message) {
  last_error = message;
  return code;
}

template <class F>
lb_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return LB_OK;
  } catch (const Error& e) {
    return set_error(static_cast<lb_status>(static_cast<int>(e.code())), e.what());
  } catch (const nlohmann::json::parse_error& e) {
    return set_error(LB_PARSE_ERROR, std::string("JSON: ") + e.what());
  } catch (const nlohmann::json::exception& e) {
    return set_error(LB_INVALID_ARGUMENT, std::string("JSON: ") + e.what());
  } catch (const std::exception& e) {
    return set_error(LB_INTERNAL, e.what());
  } catch (...) {
    return set_error(LB_INTERNAL, "unknown exception");
  }
}

void need(const void* ptr, const char* what) {
  if (!ptr) fail(ErrorCode::invalid_argument, std::string(what) + " must not be NULL");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

Json parse_params(const char* text) {
  if (!text || !*text) return Json::object();
  Json j = Json::parse(text);
  if (!j.is_object()) fail(ErrorCode::invalid_argument, "parameters must be a JSON object");
  return j;
}

lb_matrix* wrap(BandedMatrix m) { return new lb_matrix{std::move(m)}; }

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

extern "C" {

const char* lb_version(void) { return kVersion; }

const char* lb_last_error(void) { return last_error.c_str(); }

void lb_string_free(char* s) { std::free(s); }

lb_status lb_matrix_read(const char* path, lb_matrix** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = wrap(read_matrix_market(std::string(path)));
  });
}

lb_status lb_matrix_write(const lb_matrix* m, const char* path) {
  return guarded([&] {
    need(m, "matrix");
    need(path, "path");
    write_matrix_market(std::string(path), m->value);
  });
}

lb_status lb_matrix_from_triplets(size_t dim, size_t count, const size_t* rows, const size_t* cols,
                                  const double* values, lb_matrix** out) {
  return guarded([&] {
    need(out, "out");
    if (count > 0) {
      need(rows, "rows");
      need(cols, "cols");
      need(values, "values");
    }
    std::vector<Triplet> t(count);
    for (size_t k = 0; k < count; ++k) t[k] = {rows[k], cols[k], values[k]};
    *out = wrap(BandedMatrix::from_triplets(dim, std::move(t)));
  });
}

lb_status lb_matrix_info(const lb_matrix* m, size_t* dim, size_t* nnz, size_t* max_offset,
                         int* symmetric) {
  return guarded([&] {
    need(m, "matrix");
    if (dim) *dim = m->value.dim();
    if (nnz) *nnz = m->value.nnz();
    if (max_offset) *max_offset = m->value.max_offset();
    if (symmetric) *symmetric = m->value.is_exactly_symmetric() ? 1 : 0;
  });
}

lb_status lb_matrix_get(const lb_matrix* m, size_t i, size_t j, double* value) {
  return guarded([&] {
    need(m, "matrix");
    need(value, "value");
    if (i >= m->value.dim() || j >= m->value.dim()) {
      fail(ErrorCode::invalid_argument, "lb_matrix_get: index out of range");
    }
    *value = m->value.at(i, j);
  });
}

lb_status lb_matrix_equal(const lb_matrix* x, const lb_matrix* y, int* equal) {
  return guarded([&] {
    need(x, "x");
    need(y, "y");
    need(equal, "equal");
    const auto vx = x->value.values();
    const auto vy = y->value.values();
    *equal = x->value.pattern() == y->value.pattern() && vx.size() == vy.size() &&
                     (vx.empty() || std::memcmp(vx.data(), vy.data(), vx.size() * sizeof(double)) == 0)
                 ? 1
                 : 0;
  });
}

void lb_matrix_free(lb_matrix* m) { delete m; }

lb_status lb_model_generate(const char* spec_json, lb_matrix** a, lb_matrix** p,
                            char** metadata_json) {
  return guarded([&] {
    need(a, "a");
    need(p, "p");
    const Json spec = parse_params(spec_json);
    ProblemInstance inst = make_model(spec);
    std::string meta;
    if (metadata_json) meta = model_metadata(inst, spec).dump(2);
    *a = wrap(std::move(inst.a));
    *p = wrap(std::move(inst.p));
    if (metadata_json) *metadata_json = dup_string(meta);
  });
}

lb_status lb_spectrum(const lb_matrix* a, double rel_tol, char** json) {
  return guarded([&] {
    need(a, "a");
    need(json, "json");
    *json = dup_string(spectrum_to_json(extreme_eigs(a->value, rel_tol)).dump(2));
  });
}

lb_status lb_pattern_build(const lb_matrix* a, const lb_matrix* p, const char* spec,
                           lb_pattern** out) {
  return guarded([&] {
    need(a, "a");
    need(p, "p");
    need(spec, "spec");
    need(out, "out");
    *out = new lb_pattern{build_pattern(a->value, p->value, parse_pattern(spec))};
  });
}

lb_status lb_pattern_info(const lb_pattern* s, const lb_matrix* a, size_t* dim, size_t* nnz,
                          size_t* max_offset, size_t* reach_nnz) {
  return guarded([&] {
    need(s, "pattern");
    if (dim) *dim = s->value.dim();
    if (nnz) *nnz = s->value.nnz();
    if (max_offset) *max_offset = s->value.max_offset();
    if (reach_nnz) *reach_nnz = a ? row_reach(a->value, s->value).nnz() : 0;
  });
}

lb_status lb_pattern_write(const lb_pattern* s, const char* path) {
  return guarded([&] {
    need(s, "pattern");
    need(path, "path");
    write_pattern_market(path, s->value);
  });
}

void lb_pattern_free(lb_pattern* s) { delete s; }

lb_status lb_expm(const lb_matrix* a, double t, const char* params_json, lb_matrix** out,
                  char** report_json) {
  return guarded([&] {
    need(a, "a");
    need(out, "out");
    const Json params = parse_params(params_json);
    for (const auto& [key, v] : params.items()) {
      if (key != "M" && key != "R" && key != "drop" && key != "drop_period" &&
          key != "spectral_tol" && key != "compare") {
        fail(ErrorCode::invalid_argument, "expm parameters: unknown key '" + key + "'");
      }
    }
    const int degree = params.value("M", 20);
    std::optional<int> nodes;
    if (params.contains("R") && !params["R"].is_null()) nodes = params["R"].get<int>();
    std::optional<Index> drop;
    if (params.contains("drop") && !params["drop"].is_null()) drop = params["drop"].get<Index>();
    const int period = params.value("drop_period", 1);
    const double tol = params.value("spectral_tol", kDefaultSpectralTol);
    const auto start = std::chrono::steady_clock::now();
    const SpectralSummary spec = extreme_eigs(a->value, tol);
    ChebExpmResult r = cheb_expm(a->value, t, spec, degree, nodes, drop, period);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    Json rep;
    rep["t"] = t;
    rep["M"] = r.approximant.degree;
    rep["R"] = r.approximant.nodes;
    rep["drop"] = r.approximant.drop_bandwidth ? Json(*r.approximant.drop_bandwidth) : Json();
    rep["drop_period"] = r.approximant.drop_period;
    rep["tail_bound"] = r.approximant.tail_bound;
    rep["coefficients"] = r.approximant.coeffs;
    rep["spectrum"] = spectrum_to_json(spec);
    rep["nnz"] = r.value.nnz();
    rep["seconds"] = seconds;
    if (params.value("compare", false)) {
      const DenseMatrix truth = dense_expm(DenseMatrix::from_banded(a->value), t);
      rep["error_2norm"] = norm2_est(dense_add(r.value, truth, 1.0, -1.0), 1e-8);
    }
    if (report_json) *report_json = dup_string(rep.dump(2));
    *out = wrap(std::move(r.value));
  });
}

lb_status lb_solve(const lb_matrix* a, const lb_matrix* p, const char* params_json, lb_matrix** x,
                   char** report_json) {
  return guarded([&] {
    need(a, "a");
    need(p, "p");
    need(x, "x");
    SolveOutcome r = solve_with_params(a->value, p->value, parse_params(params_json));
    if (report_json) *report_json = dup_string(r.report.dump(2));
    *x = wrap(std::move(r.solution));
  });
}

lb_status lb_oracle_solve(const lb_matrix* a, const lb_matrix* p, lb_matrix** x,
                          double* relative_residual) {
  return guarded([&] {
    need(a, "a");
    need(p, "p");
    need(x, "x");
    const DenseMatrix truth = dense_lyap(a->value, p->value);
    if (relative_residual) *relative_residual = lyap_relative_residual(a->value, p->value, truth);
    *x = wrap(truth.to_banded());
  });
}

lb_status lb_accuracy(const lb_matrix* approx, const lb_matrix* truth, double* eps) {
  return guarded([&] {
    need(approx, "approx");
    need(truth, "truth");
    need(eps, "eps");
    *eps = accuracy(approx->value, DenseMatrix::from_banded(truth->value));
  });
}

lb_status lb_decay(const lb_matrix* a, const lb_matrix* p, const char* params_json, char** csv) {
  return guarded([&] {
    need(a, "a");
    need(p, "p");
    need(csv, "csv");
    const Json params = parse_params(params_json);
    for (const auto& [key, v] : params.items()) {
      if (key != "mode" && key != "samples" && key != "seed") {
        fail(ErrorCode::invalid_argument, "decay parameters: unknown key '" + key + "'");
      }
    }
    const std::string mode = params.value("mode", "offsets");
    const DenseMatrix truth = dense_lyap(a->value, p->value);
    const SpectralSummary spec = extreme_eigs(a->value, 1e-8);
    const Index n = a->value.dim();
    const Index m = a->value.pattern().bandwidth();
    std::ostringstream out;
    if (mode == "offsets") {
      // The closed-form bound applies to a scalar multiple of the identity.
      std::optional<double> gamma;
      const auto& pp = p->value.pattern();
      if (p->value.nnz() > 0 && pp.max_offset() == 0 && pp.nnz() == n) {
        gamma = p->value.values()[0];
        for (double v : p->value.values()) {
          if (v != *gamma) gamma.reset();
          if (!gamma) break;
        }
        if (gamma && !(*gamma < 0.0)) gamma.reset();
      }
      const std::vector<double> profile = empirical_decay(truth);
      std::optional<DecayEstimate> est;
      if (gamma) est = decay_diagP(*gamma, spec, m);
      out << "offset,empirical,bound\n";
      double bound = est ? est->tau : 0.0;
      for (Index k = 0; k < profile.size(); ++k) {
        out << k << ',' << fmt(profile[k]) << ',' << (est ? fmt(bound) : "") << '\n';
        if (est) bound *= est->rho;
      }
    } else if (mode == "entrywise") {
      const DecayEstimate est = decay_kron(spec, m, n);
      const Index total = n * n;
      std::vector<Index> positions;
      if (n <= 200) {
        for (Index s = 1; s <= total; ++s) positions.push_back(s);
      } else {
        const auto samples = params.value("samples", static_cast<Index>(1000));
        std::mt19937_64 rng(params.value("seed", static_cast<std::uint64_t>(1)));
        std::uniform_int_distribution<Index> pick(1, total);
        for (Index k = 0; k < samples; ++k) positions.push_back(pick(rng));
      }
      out << "s,row,col,abs_x,bound,violated\n";
      for (Index s : positions) {
        const Index row = (s - 1) % n;
        const Index col = (s - 1) / n;
        const double ax = std::abs(truth(row, col));
        const double b = entrywise_bound(p->value, est, s);
        out << s << ',' << row << ',' << col << ',' << fmt(ax) << ',' << fmt(b) << ','
            << (ax > b ? 1 : 0) << '\n';
      }
    } else {
      fail(ErrorCode::invalid_argument, "decay: unknown mode '" + mode + "'");
    }
    *csv = dup_string(out.str());
  });
}

lb_status lb_flop_estimates(double nn, double m, double d, double l, double degree, double q,
                            double out[3], int* assumptions_hold) {
  return guarded([&] {
    need(out, "out");
    const FlopEstimates f = flop_estimates(nn, m, d, l, degree, q);
    out[0] = f.o1;
    out[1] = f.o2;
    out[2] = f.o3;
    if (assumptions_hold) *assumptions_hold = f.assumptions_hold ? 1 : 0;
  });
}

lb_status lb_run_experiment(const char* config_json, const char* output_override,
                            char** manifest_json, int* failed_points) {
  return guarded([&] {
    need(config_json, "config_json");
    ExperimentOutcome r = run_experiment(parse_params(config_json), output_override ? output_override : "");
    if (failed_points) *failed_points = static_cast<int>(r.failed_points);
    if (manifest_json) *manifest_json = dup_string(r.manifest.dump(2));
  });
}

}  // extern "C"
