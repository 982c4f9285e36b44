#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace polybill {

enum class ErrorKind {
  InvalidArgument,
  DimensionMismatch,
  DegenerateTangent,
  DegenerateNormal,
  EmptyRegion,
  AxisTouching,
  OutOfDomain,
  NoIntersection,
  TangentialImpact,
  EdgeImpact,
  NoReflection,
  AmbiguousBranch,
  SingularParametrizationPoint,
  ChartMismatch,
  BranchLoss,
  Degenerate,
  ConfigError,
  SchemaMismatch,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::DegenerateTangent: return "DegenerateTangent";
    case ErrorKind::DegenerateNormal: return "DegenerateNormal";
    case ErrorKind::EmptyRegion: return "EmptyRegion";
    case ErrorKind::AxisTouching: return "AxisTouching";
    case ErrorKind::OutOfDomain: return "OutOfDomain";
    case ErrorKind::NoIntersection: return "NoIntersection";
    case ErrorKind::TangentialImpact: return "TangentialImpact";
    case ErrorKind::EdgeImpact: return "EdgeImpact";
    case ErrorKind::NoReflection: return "NoReflection";
    case ErrorKind::AmbiguousBranch: return "AmbiguousBranch";
    case ErrorKind::SingularParametrizationPoint: return "SingularParametrizationPoint";
    case ErrorKind::ChartMismatch: return "ChartMismatch";
    case ErrorKind::BranchLoss: return "BranchLoss";
    case ErrorKind::Degenerate: return "Degenerate";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::SchemaMismatch: return "SchemaMismatch";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the kinds above so
/// callers (orbit propagation, the CLI) can map it to a flag or exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace polybill
