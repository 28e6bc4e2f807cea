#include "drisk/errors.hpp"

namespace drisk {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DegenerateGrid: return "DegenerateGrid";
    case ErrorCode::GridSizeMismatch: return "GridSizeMismatch";
    case ErrorCode::MomentMismatch: return "MomentMismatch";
    case ErrorCode::InvalidDistortion: return "InvalidDistortion";
    case ErrorCode::VaRRefused: return "VaRRefused";
    case ErrorCode::AssumptionA1Violated: return "AssumptionA1Violated";
    case ErrorCode::NotConcave: return "NotConcave";
    case ErrorCode::RadiusOutOfRange: return "RadiusOutOfRange";
    case ErrorCode::RhoDegenerate: return "RhoDegenerate";
    case ErrorCode::AssumptionA4Violated: return "AssumptionA4Violated";
    case ErrorCode::DegenerateProjection: return "DegenerateProjection";
    case ErrorCode::InfeasibleRadius: return "InfeasibleRadius";
    case ErrorCode::SamplingExhausted: return "SamplingExhausted";
    case ErrorCode::VerificationFailed: return "VerificationFailed";
    case ErrorCode::InternalError: return "InternalError";
  }
  return "Unknown";
}

void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace drisk
