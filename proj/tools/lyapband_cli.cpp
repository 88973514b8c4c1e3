#include <CLI11.hpp>
#include <json.hpp>

#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lyapband/lyapband.h"

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitBadConfig = 2;

struct BadConfig : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CallFailed : std::runtime_error {
  CallFailed(lb_status code, const std::string& what) : std::runtime_error(what), status(code) {}
  lb_status status;
};

void check(lb_status s, const char* call) {
  if (s != LB_OK) throw CallFailed(s, std::string(call) + ": " + lb_last_error());
}

struct MatrixDeleter {
  void operator()(lb_matrix* m) const { lb_matrix_free(m); }
};
using Matrix = std::unique_ptr<lb_matrix, MatrixDeleter>;

struct PatternDeleter {
  void operator()(lb_pattern* s) const { lb_pattern_free(s); }
};
using Pattern = std::unique_ptr<lb_pattern, PatternDeleter>;

std::string take_string(char* s) {
  std::string out = s ? s : "";
  lb_string_free(s);
  return out;
}

enum class Kind { integer, real, text, flag };

struct OptionSpec {
  std::string flags;  // CLI11 name list
  std::string key;    // JSON key
  Kind kind;
  std::string help;
};

/// Options of one subcommand, stored as raw text and merged with an optional
/// JSON config file: flags given on the command line win.
class Options {
 public:
  Options(CLI::App* app, std::vector<OptionSpec> specs) : specs_(std::move(specs)) {
    app->add_option("--config", config_path_, "JSON file with option values");
    for (const auto& s : specs_) {
      if (s.kind == Kind::flag) {
        opts_[s.key] = app->add_flag(s.flags, flags_[s.key], s.help);
      } else {
        opts_[s.key] = app->add_option(s.flags, text_[s.key], s.help);
      }
    }
  }

  Json resolve() const {
    Json merged = Json::object();
    if (!config_path_.empty()) {
      std::ifstream in(config_path_);
      if (!in) throw BadConfig("cannot read config file '" + config_path_ + "'");
      Json file;
      try {
        file = Json::parse(in);
      } catch (const nlohmann::json::exception& e) {
        throw BadConfig("config file '" + config_path_ + "': " + e.what());
      }
      if (!file.is_object()) throw BadConfig("config file must hold a JSON object");
      for (const auto& [key, value] : file.items()) {
        if (!opts_.count(key)) throw BadConfig("config file: unknown key '" + key + "'");
        merged[key] = value;
      }
    }
    for (const auto& s : specs_) {
      if (opts_.at(s.key)->count() == 0) continue;
      if (s.kind == Kind::flag) {
        merged[s.key] = flags_.at(s.key);
        continue;
      }
      const std::string& raw = text_.at(s.key);
      try {
        std::size_t used = 0;
        if (s.kind == Kind::integer) {
          merged[s.key] = std::stoll(raw, &used);
        } else if (s.kind == Kind::real) {
          merged[s.key] = std::stod(raw, &used);
        } else {
          merged[s.key] = raw;
          used = raw.size();
        }
        if (used != raw.size()) throw std::invalid_argument(raw);
      } catch (const std::exception&) {
        throw BadConfig("option '" + s.key + "': cannot parse '" + raw + "'");
      }
    }
    return merged;
  }

 private:
  std::vector<OptionSpec> specs_;
  std::string config_path_;
  std::map<std::string, CLI::Option*> opts_;
  std::map<std::string, std::string> text_;
  std::map<std::string, bool> flags_;
};

const std::vector<OptionSpec> kModelOptions = {
    {"--model", "model", Kind::text, "model kind: heat2d, heat3d or random"},
    {"--N", "N", Kind::integer, "number of subsystems"},
    {"--N1", "N1", Kind::integer, "grid side of the 3D model"},
    {"--seed", "seed", Kind::integer, "random model seed"},
    {"--margin", "margin", Kind::real, "random model stability margin"},
    {"--kappa", "kappa", Kind::real, "target condition number"},
    {"--diagonal", "diagonal", Kind::real, "heat2d diagonal value"},
    {"--coupling", "coupling", Kind::real, "heat coupling value"},
};

const std::vector<OptionSpec> kProblemFiles = {
    {"--A", "A", Kind::text, "Matrix Market file with A"},
    {"--P", "P", Kind::text, "Matrix Market file with P"},
};

const std::vector<std::string> kCglsKeys = {"pattern", "eta_tol", "max_iter"};
const std::vector<std::string> kChebGpKeys = {
    "q",     "M",    "R",         "drop",           "drop_period",      "gp_band", "gp_pattern",
    "gp_iters", "sigma", "zeta", "delta_bar", "max_backtracks", "rel_decrease_tol", "eps1",
    "spectral_tol"};

const std::vector<OptionSpec> kSolverOptions = {
    {"--method", "method", Kind::text, "cgls or cheb-gp"},
    {"--pattern", "pattern", Kind::text, "banded:<y>, predicted:<z1>[:<cap>] or file:<path>"},
    {"--eta,--eta-tol", "eta_tol", Kind::real, "CGLS relative normal-residual tolerance"},
    {"--max-iter", "max_iter", Kind::integer, "CGLS iteration cap"},
    {"--q", "q", Kind::integer, "quadrature nodes per side"},
    {"-M,--degree", "M", Kind::integer, "Chebyshev degree"},
    {"-R,--cheb-nodes", "R", Kind::integer, "Chebyshev interpolation nodes"},
    {"--drop", "drop", Kind::integer, "dropping bandwidth d"},
    {"--drop-period", "drop_period", Kind::integer, "apply dropping every k steps"},
    {"--gp-band", "gp_band", Kind::integer, "gradient projection bandwidth d1"},
    {"--gp-pattern", "gp_pattern", Kind::text, "gradient projection pattern spec"},
    {"--gp-iters", "gp_iters", Kind::integer, "gradient projection iterations"},
    {"--sigma", "sigma", Kind::real, "Armijo sufficient decrease constant"},
    {"--zeta", "zeta", Kind::real, "Armijo backtracking factor"},
    {"--delta-bar", "delta_bar", Kind::real, "initial step size"},
    {"--max-backtracks", "max_backtracks", Kind::integer, "Armijo backtracking cap"},
    {"--rel-decrease-tol", "rel_decrease_tol", Kind::real, "relative objective decrease stop"},
    {"--eps1", "eps1", Kind::real, "quadrature shift"},
    {"--spectral-tol", "spectral_tol", Kind::real, "Lanczos relative tolerance"},
};

std::vector<OptionSpec> join(std::initializer_list<const std::vector<OptionSpec>*> parts,
                             std::vector<OptionSpec> extra = {}) {
  std::vector<OptionSpec> out;
  for (const auto* p : parts) out.insert(out.end(), p->begin(), p->end());
  out.insert(out.end(), extra.begin(), extra.end());
  return out;
}

std::string output_dir(const Json& opts) {
  if (const char* env = std::getenv("LYAPBAND_OUTPUT_DIR"); env && *env) return env;
  if (opts.contains("output_dir")) return opts["output_dir"].get<std::string>();
  return ".";
}

fs::path ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw CallFailed(LB_IO_ERROR, "cannot create '" + dir + "': " + ec.message());
  return fs::path(dir);
}

std::string model_spec(const Json& opts) {
  Json spec = Json::object();
  spec["kind"] = opts.value("model", "heat2d");
  for (const char* key : {"N", "N1", "seed", "margin", "kappa", "diagonal", "coupling"}) {
    if (opts.contains(key)) spec[key] = opts[key];
  }
  return spec.dump();
}

Matrix read_matrix(const std::string& path) {
  lb_matrix* m = nullptr;
  check(lb_matrix_read(path.c_str(), &m), "read");
  return Matrix(m);
}

/// Problem from --A/--P files, or generated from the model options.
std::pair<Matrix, Matrix> load_problem(const Json& opts, bool need_p = true) {
  if (opts.contains("A")) {
    Matrix a = read_matrix(opts["A"].get<std::string>());
    if (!need_p) return {std::move(a), nullptr};
    if (!opts.contains("P")) throw BadConfig("--P is required together with --A");
    return {std::move(a), read_matrix(opts["P"].get<std::string>())};
  }
  if (!opts.contains("model")) throw BadConfig("give --A/--P files or a --model");
  lb_matrix* a = nullptr;
  lb_matrix* p = nullptr;
  check(lb_model_generate(model_spec(opts).c_str(), &a, &p, nullptr), "model");
  return {Matrix(a), Matrix(p)};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw CallFailed(LB_IO_ERROR, "cannot write '" + path.string() + "'");
  out << text;
}

void write_history(const fs::path& path, const Json& report) {
  std::string out = std::string("iteration,") + (report["method"] == "cgls" ? "eta" : "F1") + "\n";
  std::size_t k = 0;
  char buf[64];
  for (const auto& v : report["history"]) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g\n", k++, v.get<double>());
    out += buf;
  }
  write_text(path, out);
}

void write_nodes(const fs::path& path, const Json& report) {
  std::string out = "j,omega,t,exp_time,tail_bound\n";
  char buf[160];
  for (const auto& n : report["nodes"]) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g\n", n["j"].get<int>(),
                  n["omega"].get<double>(), n["t"].get<double>(), n["exp_time"].get<double>(),
                  n["tail_bound"].get<double>());
    out += buf;
  }
  write_text(path, out);
}

int cmd_gen(const Json& opts) {
  lb_matrix* a = nullptr;
  lb_matrix* p = nullptr;
  char* meta = nullptr;
  check(lb_model_generate(model_spec(opts).c_str(), &a, &p, &meta), "gen");
  Matrix ma(a), mp(p);
  const std::string metadata = take_string(meta);
  const fs::path dir = ensure_dir(output_dir(opts));
  const std::string prefix = opts.value("prefix", opts.value("model", "heat2d"));
  check(lb_matrix_write(ma.get(), (dir / (prefix + "_A.mtx")).c_str()), "write A");
  check(lb_matrix_write(mp.get(), (dir / (prefix + "_P.mtx")).c_str()), "write P");
  write_text(dir / (prefix + ".json"), metadata + "\n");
  std::cout << metadata << '\n';
  return kExitOk;
}

int cmd_spectrum(const Json& opts) {
  auto [a, p] = load_problem(opts, false);
  char* json = nullptr;
  check(lb_spectrum(a.get(), opts.value("spectral_tol", 1e-6), &json), "spectrum");
  std::cout << take_string(json) << '\n';
  return kExitOk;
}

int cmd_pattern(const Json& opts) {
  auto [a, p] = load_problem(opts);
  const std::string spec = opts.value("pattern", "banded:20");
  lb_pattern* raw = nullptr;
  check(lb_pattern_build(a.get(), p.get(), spec.c_str(), &raw), "pattern");
  Pattern s(raw);
  std::size_t dim = 0, nnz = 0, offset = 0, reach = 0;
  check(lb_pattern_info(s.get(), a.get(), &dim, &nnz, &offset, &reach), "pattern info");
  if (opts.contains("out")) check(lb_pattern_write(s.get(), opts["out"].get<std::string>().c_str()), "write");
  Json info = {{"pattern", spec}, {"dim", dim}, {"unknowns", nnz}, {"equations", reach},
               {"max_offset", offset}, {"bandwidth", 2 * offset}};
  std::cout << info.dump(2) << '\n';
  return kExitOk;
}

int cmd_expm(const Json& opts) {
  auto [a, p] = load_problem(opts, false);
  Json params = Json::object();
  for (const char* key : {"M", "R", "drop", "drop_period", "spectral_tol", "compare"}) {
    if (opts.contains(key)) params[key] = opts[key];
  }
  lb_matrix* raw = nullptr;
  char* rep = nullptr;
  check(lb_expm(a.get(), opts.value("t", 1.0), params.dump().c_str(), &raw, &rep), "expm");
  Matrix e(raw);
  const std::string report = take_string(rep);
  if (opts.contains("out")) check(lb_matrix_write(e.get(), opts["out"].get<std::string>().c_str()), "write");
  std::cout << report << '\n';
  return kExitOk;
}

int cmd_solve(const Json& opts) {
  auto [a, p] = load_problem(opts);
  const std::string method = opts.value("method", "cgls");
  Json params = {{"method", method}};
  const auto& keys = method == "cgls" ? kCglsKeys : kChebGpKeys;
  for (const auto& key : keys) {
    if (opts.contains(key)) params[key] = opts[key];
  }
  for (const auto& key : method == "cgls" ? kChebGpKeys : kCglsKeys) {
    if (opts.contains(key)) std::cerr << "warning: option '" << key << "' ignored by " << method << '\n';
  }
  lb_matrix* raw = nullptr;
  char* rep = nullptr;
  check(lb_solve(a.get(), p.get(), params.dump().c_str(), &raw, &rep), "solve");
  Matrix x(raw);
  Json report = Json::parse(take_string(rep));
  if (opts.contains("truth")) {
    Matrix truth = read_matrix(opts["truth"].get<std::string>());
    double eps = 0.0;
    check(lb_accuracy(x.get(), truth.get(), &eps), "accuracy");
    report["accuracy"] = eps;
  }
  const fs::path dir = ensure_dir(output_dir(opts));
  check(lb_matrix_write(x.get(), (dir / "X.mtx").c_str()), "write X");
  write_history(dir / "history.csv", report);
  if (report.contains("nodes")) write_nodes(dir / "nodes.csv", report);
  write_text(dir / "report.json", report.dump(2) + "\n");
  Json summary = report;
  summary.erase("history");
  summary.erase("nodes");
  std::cout << summary.dump(2) << '\n';
  return kExitOk;
}

int cmd_oracle(const Json& opts) {
  auto [a, p] = load_problem(opts);
  lb_matrix* raw = nullptr;
  double residual = 0.0;
  check(lb_oracle_solve(a.get(), p.get(), &raw, &residual), "oracle");
  Matrix x(raw);
  const fs::path out = opts.contains("out") ? fs::path(opts["out"].get<std::string>())
                                            : ensure_dir(output_dir(opts)) / "X_true.mtx";
  check(lb_matrix_write(x.get(), out.c_str()), "write");
  std::cout << Json{{"relative_residual", residual}, {"output", out.string()}}.dump(2) << '\n';
  return kExitOk;
}

int cmd_accuracy(const Json& opts) {
  if (!opts.contains("approx") || !opts.contains("truth")) throw BadConfig("--approx and --truth are required");
  Matrix x = read_matrix(opts["approx"].get<std::string>());
  Matrix t = read_matrix(opts["truth"].get<std::string>());
  double eps = 0.0;
  check(lb_accuracy(x.get(), t.get(), &eps), "accuracy");
  std::printf("%.17g\n", eps);
  return kExitOk;
}

int cmd_decay(const Json& opts) {
  auto [a, p] = load_problem(opts);
  Json params = Json::object();
  for (const char* key : {"mode", "samples", "seed_s"}) {
    if (opts.contains(key)) params[std::string(key) == "seed_s" ? "seed" : key] = opts[key];
  }
  char* csv = nullptr;
  check(lb_decay(a.get(), p.get(), params.dump().c_str(), &csv), "decay");
  const std::string text = take_string(csv);
  if (opts.contains("out")) {
    write_text(opts["out"].get<std::string>(), text);
  } else {
    std::cout << text;
  }
  return kExitOk;
}

int cmd_bench(const std::string& config_path, const std::string& output_flag) {
  if (config_path.empty()) throw BadConfig("bench needs --config <experiment.json>");
  std::ifstream in(config_path);
  if (!in) throw BadConfig("cannot read config file '" + config_path + "'");
  Json config;
  try {
    config = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw BadConfig("config file '" + config_path + "': " + e.what());
  }
  std::string override_dir = output_flag;
  if (const char* env = std::getenv("LYAPBAND_OUTPUT_DIR"); env && *env) override_dir = env;
  char* manifest = nullptr;
  int failed = 0;
  check(lb_run_experiment(config.dump().c_str(), override_dir.empty() ? nullptr : override_dir.c_str(),
                          &manifest, &failed),
        "bench");
  const Json m = Json::parse(take_string(manifest));
  for (const auto& w : m["warnings"]) std::cerr << "warning: " << w.get<std::string>() << '\n';
  for (const auto& pt : m["points"]) {
    std::cout << "point " << pt["point"] << ' ' << pt["method"].get<std::string>() << ": "
              << pt["status"].get<std::string>();
    if (pt.contains("accuracy") && !pt["accuracy"].is_null()) std::cout << " eps=" << pt["accuracy"];
    if (pt.contains("message")) std::cout << " (" << pt["message"].get<std::string>() << ')';
    std::cout << '\n';
  }
  std::cout << "results in " << m["output_dir"].get<std::string>() << '\n';
  return failed > 0 ? kExitFailed : kExitOk;
}

/// OpenBLAS picks its kernels when the library loads, so the core type has
/// to be in the environment before the process starts.
void pin_blas_kernels(char** argv) {
  if (std::getenv("OPENBLAS_CORETYPE") || std::getenv("LYAPBAND_NO_REEXEC")) return;
  __builtin_cpu_init();
  if (!__builtin_cpu_supports("avx512f")) return;
  setenv("OPENBLAS_CORETYPE", "Haswell", 1);
  setenv("LYAPBAND_NO_REEXEC", "1", 1);
  execv("/proc/self/exe", argv);
}

}  // namespace

int main(int argc, char** argv) {
  pin_blas_kernels(argv);

  CLI::App app{"Banded solvers for large Lyapunov equations"};
  app.set_version_flag("--version", lb_version());
  app.require_subcommand(1);

  const OptionSpec out_dir{"--output-dir", "output_dir", Kind::text, "output directory"};
  const OptionSpec out_file{"--out", "out", Kind::text, "output file"};
  const OptionSpec tol{"--spectral-tol", "spectral_tol", Kind::real, "Lanczos relative tolerance"};

  auto* gen = app.add_subcommand("gen", "generate a test model (A, P and metadata)");
  Options gen_opts(gen, join({&kModelOptions}, {out_dir, {"--prefix", "prefix", Kind::text, "file prefix"}}));

  auto* spectrum = app.add_subcommand("spectrum", "extreme eigenvalues and condition number");
  Options spectrum_opts(spectrum, join({&kModelOptions}, {{"--A", "A", Kind::text, "Matrix Market file"}, tol}));

  auto* pattern = app.add_subcommand("pattern", "build an a priori sparsity pattern");
  Options pattern_opts(pattern,
                       join({&kModelOptions, &kProblemFiles},
                            {{"--pattern", "pattern", Kind::text, "banded:<y>, predicted:<z1>[:<cap>] or file:<path>"},
                             out_file}));

  auto* expm = app.add_subcommand("expm", "Chebyshev approximation of exp(tA)");
  Options expm_opts(expm, join({&kModelOptions},
                               {{"--A", "A", Kind::text, "Matrix Market file"},
                                {"--t", "t", Kind::real, "time"},
                                {"-M,--degree", "M", Kind::integer, "Chebyshev degree"},
                                {"-R,--cheb-nodes", "R", Kind::integer, "interpolation nodes"},
                                {"--drop", "drop", Kind::integer, "dropping bandwidth"},
                                {"--drop-period", "drop_period", Kind::integer, "apply dropping every k steps"},
                                tol,
                                {"--compare", "compare", Kind::flag, "report the error against the dense exponential"},
                                out_file}));

  auto* solve = app.add_subcommand("solve", "approximate banded solution");
  Options solve_opts(solve, join({&kModelOptions, &kProblemFiles, &kSolverOptions},
                                 {{"--truth", "truth", Kind::text, "reference solution for the accuracy"}, out_dir}));

  auto* oracle = app.add_subcommand("oracle", "dense reference solution");
  Options oracle_opts(oracle, join({&kModelOptions, &kProblemFiles}, {out_file, out_dir}));

  auto* acc = app.add_subcommand("accuracy", "relative 2-norm error between two matrices");
  Options acc_opts(acc, {{"--approx", "approx", Kind::text, "approximate solution"},
                         {"--truth", "truth", Kind::text, "reference solution"}});

  auto* decay = app.add_subcommand("decay", "decay bounds against the dense solution");
  Options decay_opts(decay, join({&kModelOptions, &kProblemFiles},
                                 {{"--mode", "mode", Kind::text, "offsets or entrywise"},
                                  {"--samples", "samples", Kind::integer, "sampled positions above dim 200"},
                                  {"--sample-seed", "seed_s", Kind::integer, "sampling seed"},
                                  out_file}));

  auto* bench = app.add_subcommand("bench", "run an experiment sweep");
  std::string bench_config, bench_out;
  bench->add_option("--config", bench_config, "experiment JSON")->required();
  bench->add_option("--output-dir", bench_out, "output directory override");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitBadConfig;
  }

  try {
    if (*gen) return cmd_gen(gen_opts.resolve());
    if (*spectrum) return cmd_spectrum(spectrum_opts.resolve());
    if (*pattern) return cmd_pattern(pattern_opts.resolve());
    if (*expm) return cmd_expm(expm_opts.resolve());
    if (*solve) return cmd_solve(solve_opts.resolve());
    if (*oracle) return cmd_oracle(oracle_opts.resolve());
    if (*acc) return cmd_accuracy(acc_opts.resolve());
    if (*decay) return cmd_decay(decay_opts.resolve());
    if (*bench) return cmd_bench(bench_config, bench_out);
  } catch (const BadConfig& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadConfig;
  } catch (const CallFailed& e) {
    std::cerr << "error: " << e.what() << '\n';
    const bool config_error = e.status == LB_INVALID_ARGUMENT || e.status == LB_PARSE_ERROR;
    return config_error ? kExitBadConfig : kExitFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailed;
  }
  return kExitBadConfig;
}
