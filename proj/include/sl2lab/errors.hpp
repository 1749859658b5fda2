#ifndef SL2LAB_ERRORS_HPP
#define SL2LAB_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace sl2lab {

enum class ErrorCode {
  OutOfLogDomain,
  NotHyperbolic,
  DegenerateSplitting,
  OutOfDomain,
  StepTooCoarse,
  ConsistencyFailure,
  FactorTooLarge,
  WindowOverlap,
  NotEnoughWindows,
  AngleNotSmall,
  RotationBudgetExceeded,
  AngleTooSmall,
  NoRootBracket,
  PeriodTooShort,
  IdentityResidualTooLarge,
  SingularityEncountered,
  ExtractionResidualTooLarge,
  ParseError,
  InvalidSpec,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::OutOfLogDomain: return "OutOfLogDomain";
    case ErrorCode::NotHyperbolic: return "NotHyperbolic";
    case ErrorCode::DegenerateSplitting: return "DegenerateSplitting";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::StepTooCoarse: return "StepTooCoarse";
    case ErrorCode::ConsistencyFailure: return "ConsistencyFailure";
    case ErrorCode::FactorTooLarge: return "FactorTooLarge";
    case ErrorCode::WindowOverlap: return "WindowOverlap";
    case ErrorCode::NotEnoughWindows: return "NotEnoughWindows";
    case ErrorCode::AngleNotSmall: return "AngleNotSmall";
    case ErrorCode::RotationBudgetExceeded: return "RotationBudgetExceeded";
    case ErrorCode::AngleTooSmall: return "AngleTooSmall";
    case ErrorCode::NoRootBracket: return "NoRootBracket";
    case ErrorCode::PeriodTooShort: return "PeriodTooShort";
    case ErrorCode::IdentityResidualTooLarge: return "IdentityResidualTooLarge";
    case ErrorCode::SingularityEncountered: return "SingularityEncountered";
    case ErrorCode::ExtractionResidualTooLarge: return "ExtractionResidualTooLarge";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace sl2lab

#endif  // SL2LAB_ERRORS_HPP
