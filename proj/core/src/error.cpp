#include "droplab/error.hpp"

namespace droplab {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MissingManifest: return "MissingManifest";
    case ErrorCode::InvalidField: return "InvalidField";
    case ErrorCode::MissingTrialId: return "MissingTrialId";
    case ErrorCode::DuplicateTrialId: return "DuplicateTrialId";
    case ErrorCode::InconsistentDimensions: return "InconsistentDimensions";
    case ErrorCode::NonMonotonicOrdinals: return "NonMonotonicOrdinals";
    case ErrorCode::UnsupportedPixelFormat: return "UnsupportedPixelFormat";
    case ErrorCode::Io: return "Io";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::AllDarkBackground: return "AllDarkBackground";
    case ErrorCode::ConstantSeries: return "ConstantSeries";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::EmptyGroup: return "EmptyGroup";
    case ErrorCode::NonPositiveRadius: return "NonPositiveRadius";
    case ErrorCode::NonPositiveInput: return "NonPositiveInput";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::MissingControl: return "MissingControl";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::SpecViolation: return "SpecViolation";
    case ErrorCode::StrideExceedsStack: return "StrideExceedsStack";
    case ErrorCode::UnwritableOutput: return "UnwritableOutput";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

int exit_code(ErrorCode code) noexcept {
  // 1 is reserved for unexpected failures, 2 for usage errors.
  return 10 + static_cast<int>(code);
}

}  // namespace droplab
