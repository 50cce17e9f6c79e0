#pragma once

#include <stdexcept>
#include <string>

namespace selfsep {

// Stable error codes, mirrored one-to-one by the C API status values.
enum class ErrorCode {
  invalid_argument = 1,
  invalid_state = 2,
  infeasible_geometry = 3,
  io = 4,
  parse = 5,
  numeric = 6,
  unsupported = 7,
  internal = 8,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::invalid_state: return "invalid_state";
    case ErrorCode::infeasible_geometry: return "infeasible_geometry";
    case ErrorCode::io: return "io";
    case ErrorCode::parse: return "parse";
    case ErrorCode::numeric: return "numeric";
    case ErrorCode::unsupported: return "unsupported";
    case ErrorCode::internal: return "internal";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) raise(code, message);
}

}  // namespace selfsep
