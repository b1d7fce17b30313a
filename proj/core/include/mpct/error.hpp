#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mpct {

enum class ErrorCode {
  kDimensionMismatch,
  kNonPositiveWeight,
  kEmptyBox,
  kHorizonTooShort,
  kInvalidArgument,
  kRankDeficientG2,
  kFactorizationFailure,
  kSupportViolation,
  kSingularKkt,
  kNumericalBreakdown,
  kSingularConfiguration,
};

std::string_view to_string(ErrorCode code);

/// Error raised by every validating or numerical routine in the library.
class MpctError : public std::runtime_error {
 public:
  MpctError(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mpct
