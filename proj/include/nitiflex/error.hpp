#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nitiflex {

enum class ErrorKind {
  Domain,
  FitDegenerate,
  InsufficientData,
  DegenerateSection,
  SolverFailure,
  WrongProfile,
  DegenerateRegressor,
  NoFeasibleSetting,
  Dimension,
  EmptyOverlap,
  InfeasibleProfile,
  Io,
  Parse,
};

constexpr std::string_view error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Domain: return "DomainError";
    case ErrorKind::FitDegenerate: return "FitDegenerateError";
    case ErrorKind::InsufficientData: return "InsufficientDataError";
    case ErrorKind::DegenerateSection: return "DegenerateSectionError";
    case ErrorKind::SolverFailure: return "SolverFailureError";
    case ErrorKind::WrongProfile: return "WrongProfileError";
    case ErrorKind::DegenerateRegressor: return "DegenerateRegressorError";
    case ErrorKind::NoFeasibleSetting: return "NoFeasibleSettingError";
    case ErrorKind::Dimension: return "DimensionError";
    case ErrorKind::EmptyOverlap: return "EmptyOverlapError";
    case ErrorKind::InfeasibleProfile: return "InfeasibleProfileError";
    case ErrorKind::Io: return "IoError";
    case ErrorKind::Parse: return "ParseError";
  }
  return "Error";
}

/// Single exception type for the library; `kind()` identifies the failure
/// class so callers (and the CLI) can report it by name.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::string_view kind_name() const noexcept { return error_kind_name(kind_); }

 private:
  ErrorKind kind_;
};

}  // namespace nitiflex
