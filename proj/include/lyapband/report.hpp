#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace lyapband {

struct FlopEstimates {
  double o1 = 0.0;
  double o2 = 0.0;
  double o3 = 0.0;
  bool assumptions_hold = true;
};

struct SolveReport {
  std::string method;
  std::map<std::string, double> parameters;
  /// eta per iteration for CGLS, F1 per iteration for gradient projection.
  std::vector<double> history;
  std::size_t iterations = 0;
  bool converged = false;
  std::string stop_reason;
  double seconds = 0.0;
  std::size_t peak_nnz = 0;
  std::size_t result_nnz = 0;
  std::optional<std::size_t> unknowns;   // N1 = |S|
  std::optional<std::size_t> equations;  // N2 = |row_reach(S)|
  std::optional<double> max_asymmetry;
  std::optional<FlopEstimates> flops;
  std::optional<double> accuracy;
};

}  // namespace lyapband
