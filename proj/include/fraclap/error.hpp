#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fraclap {

enum class ErrorCode {
  invalid_dimension,
  invalid_grid,
  invalid_parameter,
  unknown_descriptor,
  non_finite,
  grid_mismatch,
  grid_too_coarse,
  degenerate_fit,
  missing_parameter,
  io_error,
  empty_input,
};

std::string_view to_string(ErrorCode code);

/// Exception carrying a machine-checkable error category.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) throw Error(code, message);
}

}  // namespace fraclap
