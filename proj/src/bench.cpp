#include "lyapband/bench.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "lyapband/error.hpp"
#include "lyapband/mm_io.hpp"
#include "lyapband/oracle.hpp"
#include "lyapband/pattern.hpp"
#include "lyapband/version.hpp"

namespace lyapband {

namespace fs = std::filesystem;

namespace {

void reject_unknown_keys(const Json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) fail(ErrorCode::invalid_argument, where + ": expected a JSON object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) fail(ErrorCode::invalid_argument, where + ": unknown key '" + key + "'");
  }
}

template <class T>
T get_or(const Json& obj, const char* key, T fallback) {
  if (!obj.contains(key) || obj.at(key).is_null()) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::invalid_argument, std::string("parameter '") + key + "': " + e.what());
  }
}

template <class T>
std::optional<T> get_opt(const Json& obj, const char* key) {
  if (!obj.contains(key) || obj.at(key).is_null()) return std::nullopt;
  return get_or<T>(obj, key, T{});
}

Index get_index(const Json& obj, const char* key, Index fallback) {
  const long long v = get_or<long long>(obj, key, static_cast<long long>(fallback));
  if (v < 0) fail(ErrorCode::invalid_argument, std::string("parameter '") + key + "' must be >= 0");
  return static_cast<Index>(v);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Json flops_to_json(const FlopEstimates& f) {
  return {{"o1", f.o1}, {"o2", f.o2}, {"o3", f.o3}, {"assumptions_hold", f.assumptions_hold}};
}

const std::set<std::string> kCglsKeys = {"method", "pattern", "eta_tol", "max_iter"};
const std::set<std::string> kChebGpKeys = {
    "method", "q",        "M",     "R",          "drop",           "drop_period",      "gp_band",
    "gp_pattern", "gp_iters", "sigma", "zeta",  "delta_bar", "max_backtracks", "rel_decrease_tol",
    "eps1",   "spectral_tol"};

}  // namespace

FlopEstimates flop_estimates(double nn, double m, double d, double l, double degree, double q) {
  FlopEstimates f;
  f.assumptions_hold = nn > 0 && m > 0 && d > 0 && l > 0 && degree > 0 && q > 0 && d > m && l < d;
  f.o1 = nn * (m + d + 2.0 + (d + m + 1.0) * (2.0 * m + 1.0));
  f.o2 = (degree - 2.0) * f.o1 + 2.0 * nn * degree * (d + 1.0);
  f.o3 = (2.0 * q + 1.0) * (f.o2 + nn * (d + l + 1.0) * (2.0 * l + 1.0) +
                            nn * (2.0 * d + l + 1.0) * (2.0 * d + 1.0) + nn * (d + 1.0));
  return f;
}

Json report_to_json(const SolveReport& r) {
  Json j;
  j["method"] = r.method;
  Json params = Json::object();
  for (const auto& [k, v] : r.parameters) params[k] = v;
  j["parameters"] = params;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["stop_reason"] = r.stop_reason;
  j["seconds"] = r.seconds;
  j["peak_nnz"] = r.peak_nnz;
  j["result_nnz"] = r.result_nnz;
  j["unknowns"] = r.unknowns ? Json(*r.unknowns) : Json();
  j["equations"] = r.equations ? Json(*r.equations) : Json();
  j["max_asymmetry"] = r.max_asymmetry ? Json(*r.max_asymmetry) : Json();
  j["flops"] = r.flops ? flops_to_json(*r.flops) : Json();
  j["accuracy"] = r.accuracy ? Json(*r.accuracy) : Json();
  j["history"] = r.history;
  return j;
}

Json spectrum_to_json(const SpectralSummary& s) {
  return {{"a", s.a},
          {"b", s.b},
          {"kappa", s.kappa},
          {"rel_tol", s.rel_tol},
          {"iterations", s.iterations},
          {"converged", s.converged}};
}

ProblemInstance make_model(const Json& spec) {
  reject_unknown_keys(spec, {"kind", "N", "N1", "seed", "margin", "kappa", "diagonal", "coupling"},
                      "model");
  const std::string kind = get_or<std::string>(spec, "kind", "heat2d");
  const auto kappa = get_opt<double>(spec, "kappa");
  if (kind == "heat2d") {
    const Index n = get_index(spec, "N", 10);
    const double diagonal = get_or<double>(spec, "diagonal", kHeatDiagonal);
    double coupling = get_or<double>(spec, "coupling", kHeatCoupling);
    if (kappa) coupling = heat2d_coupling_for_kappa(n, *kappa, diagonal);
    return gen_heat2d(n, diagonal, coupling);
  }
  if (kind == "heat3d") {
    return gen_heat3d(get_index(spec, "N1", get_index(spec, "N", 5)),
                      get_or<double>(spec, "coupling", kHeatCoupling));
  }
  if (kind == "random") {
    const Index n = get_index(spec, "N", 10);
    const auto seed = get_or<std::uint64_t>(spec, "seed", 1);
    double margin = get_or<double>(spec, "margin", 0.0);
    if (kappa) margin = random_margin_for_kappa(n, seed, *kappa);
    return gen_random_stable(n, seed, margin);
  }
  fail(ErrorCode::invalid_argument, "model: unknown kind '" + kind + "'");
}

Json model_metadata(const ProblemInstance& inst, const Json& spec) {
  Json j;
  j["model"] = inst.label;
  j["N"] = inst.subsystems;
  j["n"] = inst.local_order;
  j["dim"] = inst.a.dim();
  j["seed"] = inst.seed;
  j["margin"] = inst.margin;
  j["nnz_A"] = inst.a.nnz();
  j["nnz_P"] = inst.p.nnz();
  j["max_offset_A"] = inst.a.max_offset();
  j["max_offset_P"] = inst.p.max_offset();
  const SpectralSummary s = inst.spectrum ? *inst.spectrum : extreme_eigs(inst.a, 1e-8);
  j["a"] = s.a;
  j["b"] = s.b;
  j["kappa"] = s.kappa;
  j["spectral_tol"] = s.rel_tol;
  j["spec"] = spec;
  return j;
}

PatternSpec parse_pattern(const std::string& text) {
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : text.substr(colon + 1);
  const auto number = [&](const std::string& s) -> Index {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (s.empty() || used != s.size()) {
      fail(ErrorCode::invalid_argument, "pattern '" + text + "': expected a non-negative integer");
    }
    return static_cast<Index>(v);
  };
  if (kind == "banded") return BandedPatternSpec{number(rest)};
  if (kind == "predicted") {
    const auto sep = rest.find(':');
    PredictedPatternSpec p;
    p.levels = number(rest.substr(0, sep));
    if (sep != std::string::npos) p.bandwidth_cap = number(rest.substr(sep + 1));
    return p;
  }
  if (kind == "file") return read_matrix_market(rest).pattern();
  fail(ErrorCode::invalid_argument,
       "pattern '" + text + "': expected banded:<y>, predicted:<z1>[:<cap>] or file:<path>");
}

SolveOutcome solve_with_params(const BandedMatrix& a, const BandedMatrix& p, const Json& params,
                               const std::optional<SpectralSummary>& spec) {
  const std::string method = get_or<std::string>(params, "method", "cgls");
  SolveOutcome out;
  if (method == "cgls") {
    reject_unknown_keys(params, kCglsKeys, "cgls parameters");
    CglsConfig cfg;
    const std::string pattern = get_or<std::string>(params, "pattern", "banded:20");
    cfg.pattern = parse_pattern(pattern);
    cfg.eta_tol = get_or<double>(params, "eta_tol", cfg.eta_tol);
    cfg.max_iter = get_or<int>(params, "max_iter", cfg.max_iter);
    CglsResult r = cgls_solve(a, p, cfg);
    out.solution = std::move(r.solution);
    out.report = report_to_json(r.report);
    out.report["parameters"]["pattern"] = pattern;
    return out;
  }
  if (method == "cheb-gp") {
    reject_unknown_keys(params, kChebGpKeys, "cheb-gp parameters");
    ChebGpConfig cfg;
    cfg.q = get_or<int>(params, "q", cfg.q);
    cfg.cheb.degree = get_or<int>(params, "M", cfg.cheb.degree);
    cfg.cheb.nodes = get_opt<int>(params, "R");
    if (const auto d = get_opt<long long>(params, "drop")) {
      if (*d < 0) fail(ErrorCode::invalid_argument, "parameter 'drop' must be >= 0");
      cfg.cheb.drop_bandwidth = static_cast<Index>(*d);
    }
    cfg.cheb.drop_period = get_or<int>(params, "drop_period", cfg.cheb.drop_period);
    if (const auto band = get_opt<long long>(params, "gp_band")) {
      if (*band < 0) fail(ErrorCode::invalid_argument, "parameter 'gp_band' must be >= 0");
      cfg.gp.feasible = static_cast<Index>(*band);
    }
    if (const auto pat = get_opt<std::string>(params, "gp_pattern")) {
      cfg.gp.feasible = build_pattern(a, p, parse_pattern(*pat));
    }
    cfg.gp.max_iter = get_or<int>(params, "gp_iters", cfg.gp.max_iter);
    cfg.gp.sigma = get_or<double>(params, "sigma", cfg.gp.sigma);
    cfg.gp.zeta = get_or<double>(params, "zeta", cfg.gp.zeta);
    cfg.gp.delta_bar = get_opt<double>(params, "delta_bar");
    cfg.gp.max_backtracks = get_or<int>(params, "max_backtracks", cfg.gp.max_backtracks);
    cfg.gp.rel_decrease_tol = get_or<double>(params, "rel_decrease_tol", cfg.gp.rel_decrease_tol);
    cfg.eps1 = get_opt<double>(params, "eps1");
    cfg.spectral_tol = get_or<double>(params, "spectral_tol", cfg.spectral_tol);
    ChebGpResult r = solve_cheb_gp(a, p, cfg, spec);
    const double d = cfg.cheb.drop_bandwidth ? static_cast<double>(*cfg.cheb.drop_bandwidth)
                                             : static_cast<double>(2 * (a.dim() - 1));
    r.report.flops = flop_estimates(static_cast<double>(a.dim()),
                                    static_cast<double>(a.pattern().bandwidth()), d,
                                    static_cast<double>(p.pattern().bandwidth()), cfg.cheb.degree, cfg.q);
    out.solution = std::move(r.solution);
    out.report = report_to_json(r.report);
    out.report["spectrum"] = spectrum_to_json(r.spectrum);
    Json nodes = Json::array();
    for (std::size_t k = 0; k < r.rule.nodes.size(); ++k) {
      const auto& n = r.rule.nodes[k];
      nodes.push_back({{"j", n.j},
                       {"omega", n.weight},
                       {"t", n.time},
                       {"exp_time", r.node_approximants[k].t},
                       {"tail_bound", r.node_approximants[k].tail_bound}});
    }
    out.report["nodes"] = nodes;
    out.report["initial_nnz"] = r.initial.nnz();
    return out;
  }
  fail(ErrorCode::invalid_argument, "unknown method '" + method + "' (expected cgls or cheb-gp)");
}

namespace {

struct SweepPoint {
  std::string variable;
  double value = 0.0;
};

Json apply_sweep_to_model(Json model, const SweepPoint& pt) {
  if (pt.variable == "N") {
    const std::string kind = get_or<std::string>(model, "kind", "heat2d");
    model[kind == "heat3d" ? "N1" : "N"] = static_cast<long long>(pt.value);
  }
  return model;
}

Json apply_sweep_to_method(Json method, const SweepPoint& pt, const std::string& default_pattern) {
  const std::string name = get_or<std::string>(method, "method", "cgls");
  const auto iv = static_cast<long long>(pt.value);
  if (name == "cgls") {
    if (!method.contains("pattern")) method["pattern"] = default_pattern;
    if (pt.variable == "bandwidth" || pt.variable == "y") method["pattern"] = "banded:" + std::to_string(iv);
    if (pt.variable == "z1") {
      // Keep an optional cap from the configured predicted pattern.
      std::string cap;
      const std::string cur = method["pattern"].get<std::string>();
      if (cur.rfind("predicted:", 0) == 0) {
        const auto sep = cur.find(':', 10);
        if (sep != std::string::npos) cap = cur.substr(sep);
      }
      method["pattern"] = "predicted:" + std::to_string(iv) + cap;
    }
  } else {
    if (pt.variable == "bandwidth") method["drop"] = iv;
    if (pt.variable == "q") method["q"] = iv;
    if (pt.variable == "gp_iters") method["gp_iters"] = iv;
  }
  return method;
}

void write_history(const fs::path& path, const Json& history, const std::string& name) {
  std::ofstream out(path);
  out << "iteration," << name << '\n';
  std::size_t k = 0;
  for (const auto& v : history) out << k++ << ',' << fmt(v.get<double>()) << '\n';
}

Json environment_info() {
  Json env;
  env["library_version"] = kVersion;
  env["compiler"] = __VERSION__;
  env["cxx_standard"] = static_cast<long long>(__cplusplus);
  env["hardware_threads"] = std::thread::hardware_concurrency();
  const char* core = std::getenv("OPENBLAS_CORETYPE");
  env["openblas_coretype"] = core ? Json(core) : Json();
  const std::time_t now = std::time(nullptr);
  char buf[64];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  env["started_utc"] = buf;
  return env;
}

}  // namespace

ExperimentOutcome run_experiment(const Json& config, const std::string& output_override) {
  reject_unknown_keys(config,
                      {"label", "model", "methods", "pattern", "sweep", "oracle", "output_dir",
                       "write_matrices"},
                      "experiment config");
  if (!config.contains("model")) fail(ErrorCode::invalid_argument, "experiment config: missing 'model'");
  const Json model_spec = config.at("model");
  const std::string default_pattern = get_or<std::string>(config, "pattern", "banded:20");
  parse_pattern(default_pattern.rfind("file:", 0) == 0 ? "banded:0" : default_pattern);

  std::vector<Json> methods;
  if (config.contains("methods")) {
    if (!config.at("methods").is_array() || config.at("methods").empty()) {
      fail(ErrorCode::invalid_argument, "experiment config: 'methods' must be a non-empty array");
    }
    for (const auto& m : config.at("methods")) {
      methods.push_back(m.is_string() ? Json{{"method", m.get<std::string>()}} : m);
    }
  } else {
    methods.push_back(Json{{"method", "cgls"}});
  }
  for (const auto& m : methods) {
    const std::string name = get_or<std::string>(m, "method", "cgls");
    reject_unknown_keys(m, name == "cgls" ? kCglsKeys : kChebGpKeys, "method '" + name + "'");
    if (name != "cgls" && name != "cheb-gp") {
      fail(ErrorCode::invalid_argument, "experiment config: unknown method '" + name + "'");
    }
  }

  std::vector<SweepPoint> points;
  if (config.contains("sweep")) {
    const Json& sw = config.at("sweep");
    reject_unknown_keys(sw, {"variable", "values"}, "sweep");
    const std::string var = get_or<std::string>(sw, "variable", "");
    static const std::set<std::string> vars = {"N", "bandwidth", "y", "q", "z1", "gp_iters"};
    if (!vars.count(var)) fail(ErrorCode::invalid_argument, "sweep: unknown variable '" + var + "'");
    if (!sw.contains("values") || !sw.at("values").is_array() || sw.at("values").empty()) {
      fail(ErrorCode::invalid_argument, "sweep: 'values' must be a non-empty array");
    }
    double prev = 0.0;
    for (const auto& v : sw.at("values")) {
      if (!v.is_number()) fail(ErrorCode::invalid_argument, "sweep: values must be numbers");
      const double x = v.get<double>();
      if (!(x > 0.0) || (!points.empty() && !(x > prev))) {
        fail(ErrorCode::invalid_argument, "sweep: values must be positive and strictly increasing");
      }
      if (x != std::floor(x)) fail(ErrorCode::invalid_argument, "sweep: values must be integers");
      points.push_back({var, x});
      prev = x;
    }
  } else {
    points.push_back({"", 0.0});
  }

  std::string out_dir = output_override.empty() ? get_or<std::string>(config, "output_dir", "lyapband_out")
                                                : output_override;
  const bool oracle_on = get_or<bool>(config, "oracle", true);
  const bool write_matrices = get_or<bool>(config, "write_matrices", true);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) fail(ErrorCode::io_error, "cannot create output directory '" + out_dir + "': " + ec.message());

  ExperimentOutcome outcome;
  Json manifest;
  manifest["schema_version"] = kCsvSchemaVersion;
  manifest["label"] = get_or<std::string>(config, "label", "");
  manifest["config"] = config;
  manifest["output_dir"] = out_dir;
  manifest["environment"] = environment_info();
  Json warnings = Json::array();
  Json point_log = Json::array();
  Json defaults_used = Json::object();

  std::ofstream csv(fs::path(out_dir) / "results.csv");
  if (!csv) fail(ErrorCode::io_error, "cannot write results.csv in '" + out_dir + "'");
  csv << "schema_version,point,method,sweep_variable,sweep_value,dim,unknowns,equations,iterations,"
         "converged,stop_reason,seconds,peak_nnz,result_nnz,accuracy,status,message\n";

  std::optional<Json> cached_model_spec;
  std::optional<ProblemInstance> inst;
  std::optional<DenseMatrix> truth;
  for (std::size_t k = 0; k < points.size(); ++k) {
    const SweepPoint& pt = points[k];
    const Json mspec = apply_sweep_to_model(model_spec, pt);
    std::string model_error;
    if (!cached_model_spec || *cached_model_spec != mspec) {
      inst.reset();
      truth.reset();
      cached_model_spec = mspec;
      try {
        inst = make_model(mspec);
        if (oracle_on) {
          if (inst->a.dim() > kDenseOracleMaxDim) {
            warnings.push_back("oracle disabled for dim " + std::to_string(inst->a.dim()) +
                               " (cap " + std::to_string(kDenseOracleMaxDim) + ")");
          } else {
            truth = dense_lyap(inst->a, inst->p);
          }
        }
      } catch (const std::exception& e) {
        model_error = e.what();
        inst.reset();
      }
    }
    for (const Json& m0 : methods) {
      const Json m = apply_sweep_to_method(m0, pt, default_pattern);
      const std::string name = m.at("method").get<std::string>();
      Json entry = {{"point", k}, {"method", name}, {"sweep_value", pt.value}, {"parameters", m}};
      std::string status = "ok", message;
      Json rep;
      try {
        if (!inst) fail(ErrorCode::numerical, model_error.empty() ? "model construction failed" : model_error);
        SolveOutcome res = solve_with_params(inst->a, inst->p, m, inst->spectrum);
        rep = std::move(res.report);
        if (truth) rep["accuracy"] = accuracy(res.solution, *truth);
        const fs::path dir = fs::path(out_dir) / ("point_" + std::to_string(k) + "_" + name);
        fs::create_directories(dir);
        if (write_matrices) write_matrix_market((dir / "X.mtx").string(), res.solution);
        write_history(dir / "history.csv", rep["history"], name == "cgls" ? "eta" : "F1");
        std::ofstream(dir / "report.json") << rep.dump(2) << '\n';
        if (!defaults_used.contains(name)) defaults_used[name] = rep["parameters"];
      } catch (const std::exception& e) {
        status = "failed";
        message = e.what();
        ++outcome.failed_points;
      }
      const auto field = [&](const char* key) -> std::string {
        if (!rep.contains(key) || rep[key].is_null()) return "";
        const Json& v = rep[key];
        if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
        if (v.is_string()) return v.get<std::string>();
        if (v.is_number_float()) return fmt(v.get<double>());
        return v.dump();
      };
      std::string clean = message;
      for (char& c : clean) {
        if (c == ',' || c == '\n') c = ';';
      }
      csv << kCsvSchemaVersion << ',' << k << ',' << name << ',' << pt.variable << ','
          << (pt.variable.empty() ? "" : fmt(pt.value)) << ',' << (inst ? std::to_string(inst->a.dim()) : "")
          << ',' << field("unknowns") << ',' << field("equations") << ',' << field("iterations") << ','
          << field("converged") << ',' << field("stop_reason") << ',' << field("seconds") << ','
          << field("peak_nnz") << ',' << field("result_nnz") << ',' << field("accuracy") << ','
          << status << ',' << clean << '\n';
      entry["status"] = status;
      if (!message.empty()) entry["message"] = message;
      if (!rep.is_null()) {
        entry["accuracy"] = rep["accuracy"];
        entry["seconds"] = rep["seconds"];
        entry["iterations"] = rep["iterations"];
      }
      point_log.push_back(entry);
    }
  }
  manifest["oracle"] = oracle_on;
  manifest["defaults_used"] = defaults_used;
  manifest["warnings"] = warnings;
  manifest["points"] = point_log;
  manifest["failed_points"] = outcome.failed_points;
  std::ofstream(fs::path(out_dir) / "manifest.json") << manifest.dump(2) << '\n';
  outcome.manifest = std::move(manifest);
  return outcome;
}

}  // namespace lyapband
