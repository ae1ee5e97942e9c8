#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace droplab {

// Typed failure categories. Each maps to a distinct CLI exit code.
enum class ErrorCode {
  MissingManifest,
  InvalidField,
  MissingTrialId,
  DuplicateTrialId,
  InconsistentDimensions,
  NonMonotonicOrdinals,
  UnsupportedPixelFormat,
  Io,
  DimensionMismatch,
  AllDarkBackground,
  ConstantSeries,
  InsufficientData,
  EmptyGroup,
  NonPositiveRadius,
  NonPositiveInput,
  TooShort,
  MissingControl,
  EmptyInput,
  UnknownLabel,
  SpecViolation,
  StrideExceedsStack,
  UnwritableOutput,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code) noexcept;

// Process exit code reported by the CLI for a given error.
int exit_code(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace droplab
