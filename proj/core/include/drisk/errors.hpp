#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace drisk {

enum class ErrorCode {
  InvalidArgument,
  ParseError,
  DegenerateGrid,
  GridSizeMismatch,
  MomentMismatch,
  InvalidDistortion,
  VaRRefused,
  AssumptionA1Violated,
  NotConcave,
  RadiusOutOfRange,
  RhoDegenerate,
  AssumptionA4Violated,
  DegenerateProjection,
  InfeasibleRadius,
  SamplingExhausted,
  VerificationFailed,
  InternalError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Base exception for every failure raised by the library. The code is
/// stable and is what callers (and the CLI exit-code mapping) switch on.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace drisk
