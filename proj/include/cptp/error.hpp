#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cptp {

enum class ErrorCode {
  kNonHermitian,
  kConvergenceFailure,
  kNotPositiveDefinite,
  kOverflow,
  kSingular,
  kLeakageTooLarge,
  kDimMismatch,
  kNonHermitianHamiltonian,
  kDimTooLarge,
  kDegenerateTrace,
  kStepUnderflow,
  kMaxStepsExceeded,
  kTraceDrift,
  kGridMismatch,
  kInsufficientPoints,
  kBadConfig,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// callers (tests, the bench driver) can dispatch on the kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace cptp
