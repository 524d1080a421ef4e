#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lorinv {

enum class ErrorKind {
  NotHermitian,
  NoConvergence,
  ZeroState,
  SingularOperator,
  SamplingFailure,
  InvalidDensity,
  NonHermitianInput,
  NotUnitDeterminant,
  DegenerateNormalization,
  ComplexSpectrum,
  KempeInconsistent,
  BridgeViolation,
  PermutationAsymmetry,
  RouteMismatch,
  ReductionFailure,
  NotCaseI,
  NotCaseII,
  DegenerateFrame,
  DomainError,
  InvalidInput,
};

constexpr std::string_view to_string(ErrorKind k) noexcept {
  switch (k) {
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::ZeroState: return "ZeroState";
    case ErrorKind::SingularOperator: return "SingularOperator";
    case ErrorKind::SamplingFailure: return "SamplingFailure";
    case ErrorKind::InvalidDensity: return "InvalidDensity";
    case ErrorKind::NonHermitianInput: return "NonHermitianInput";
    case ErrorKind::NotUnitDeterminant: return "NotUnitDeterminant";
    case ErrorKind::DegenerateNormalization: return "DegenerateNormalization";
    case ErrorKind::ComplexSpectrum: return "ComplexSpectrum";
    case ErrorKind::KempeInconsistent: return "KempeInconsistent";
    case ErrorKind::BridgeViolation: return "BridgeViolation";
    case ErrorKind::PermutationAsymmetry: return "PermutationAsymmetry";
    case ErrorKind::RouteMismatch: return "RouteMismatch";
    case ErrorKind::ReductionFailure: return "ReductionFailure";
    case ErrorKind::NotCaseI: return "NotCaseI";
    case ErrorKind::NotCaseII: return "NotCaseII";
    case ErrorKind::DegenerateFrame: return "DegenerateFrame";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::InvalidInput: return "InvalidInput";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the kinds above so
/// callers (the CLI in particular) can map them onto exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  /// True for failures of an internal identity check (as opposed to bad input).
  bool is_identity_violation() const noexcept {
    switch (kind_) {
      case ErrorKind::KempeInconsistent:
      case ErrorKind::BridgeViolation:
      case ErrorKind::PermutationAsymmetry:
      case ErrorKind::RouteMismatch:
      case ErrorKind::ReductionFailure:
      case ErrorKind::ComplexSpectrum:
      case ErrorKind::NoConvergence:
        return true;
      default:
        return false;
    }
  }

 private:
  ErrorKind kind_;
};

}  // namespace lorinv
