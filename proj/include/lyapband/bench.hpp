#pragma once

#include <json.hpp>
#include <string>

#include "lyapband/banded_matrix.hpp"
#include "lyapband/cgls.hpp"
#include "lyapband/models.hpp"
#include "lyapband/quadrature.hpp"
#include "lyapband/report.hpp"

namespace lyapband {

using Json = nlohmann::ordered_json;

inline constexpr const char* kCsvSchemaVersion = "1";

/// Operation counts for one dropped Chebyshev product (o1), one matrix
/// exponential (o2) and the quadrature sum (o3). Nn = dim, m, d, l are
/// bandwidths of A, the dropping and P; M is the degree; q the node parameter.
FlopEstimates flop_estimates(double nn, double m, double d, double l, double degree, double q);

Json report_to_json(const SolveReport& r);
Json spectrum_to_json(const SpectralSummary& s);

/// {"kind": "heat2d"|"heat3d"|"random", "N", "N1", "seed", "margin", "kappa",
///  "diagonal", "coupling"}.
ProblemInstance make_model(const Json& spec);
Json model_metadata(const ProblemInstance& inst, const Json& spec);

/// "banded:<y>", "predicted:<z1>[:<cap>]" or "file:<path.mtx>".
PatternSpec parse_pattern(const std::string& text);

struct SolveOutcome {
  BandedMatrix solution;
  Json report;
};

/// params: {"method": "cgls"|"cheb-gp", ...method parameters}. The report
/// lists every parameter value actually used, defaults included.
SolveOutcome solve_with_params(const BandedMatrix& a, const BandedMatrix& p, const Json& params,
                               const std::optional<SpectralSummary>& spec = std::nullopt);

struct ExperimentOutcome {
  Json manifest;
  std::size_t failed_points = 0;
};

/// Runs a sweep and writes results.csv, manifest.json and one directory per
/// point into the output directory (output_override wins over the config).
/// Invalid configurations throw ErrorCode::invalid_argument.
ExperimentOutcome run_experiment(const Json& config, const std::string& output_override = "");

}  // namespace lyapband
