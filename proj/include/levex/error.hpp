#pragma once

#include <stdexcept>
#include <string>

namespace levex {

// Values line up with the C status codes and the CLI exit codes.
enum class ErrorCode {
  InvalidArgument = 1,
  Config = 2,
  Numerical = 3,
  DuplicateLocation = 4,
  GridMismatch = 5,
  Io = 6,
  Domain = 7,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace levex
