#pragma once

#include <stdexcept>
#include <string>

namespace qpa {

enum class ErrorCode {
  InvalidArgument,
  Config,
  Degenerate,
  NoThreshold,
  InsufficientTail,
  Halt,
  Verification,
  Io,
};

const char* to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above; the C
/// API translates them into `qpa_status` values.
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

inline void require(bool condition, const std::string& message) {
  if (!condition) fail(ErrorCode::InvalidArgument, message);
}

}  // namespace qpa
