#pragma once

#include <stdexcept>
#include <string>

namespace lyapband {

enum class ErrorCode {
  invalid_argument = 1,
  dimension_mismatch = 2,
  parse_error = 3,
  io_error = 4,
  not_symmetric = 5,
  diverged = 6,
  numerical = 7,
};

// Single exception type for the library; the C API maps code() onto lb_status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require_same_dim(std::size_t lhs, std::size_t rhs, const char* op) {
  if (lhs != rhs) {
    fail(ErrorCode::dimension_mismatch, std::string(op) + ": dimension mismatch (" +
                                            std::to_string(lhs) + " vs " + std::to_string(rhs) + ")");
  }
}

}  // namespace lyapband
