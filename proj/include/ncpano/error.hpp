#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ncpano {

// Failure categories. Each maps onto a distinct CLI exit code.
enum class ErrorCode {
  kInvalidArgument,
  kOutOfRange,
  kParse,
  kIo,
  kDegenerate,
  kInfeasibleLayout,
  kSegmentation,
  kNoRealSolution,
  kGeneration,
  kMetric,
  kInternal,
};

std::string_view to_string(ErrorCode code);

// Process exit code for a failure category (0 is reserved for success).
int exit_code(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace ncpano
