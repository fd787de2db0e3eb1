#include "circrel/error.hpp"

namespace circrel {
namespace {

std::string format_message(ErrorKind kind, const std::string& detail,
                           std::optional<std::size_t> leg) {
  std::string msg(to_string(kind));
  if (leg) msg += " (leg " + std::to_string(*leg + 1) + ")";
  if (!detail.empty()) msg += ": " + detail;
  return msg;
}

}  // namespace

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::EmptyPlan: return "EmptyPlan";
    case ErrorKind::NegativeSlack: return "NegativeSlack";
    case ErrorKind::EmptySample: return "EmptySample";
    case ErrorKind::InvalidSample: return "InvalidSample";
    case ErrorKind::NonpositiveRate: return "NonpositiveRate";
    case ErrorKind::LegCountMismatch: return "LegCountMismatch";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::OutOfRangeProbability: return "OutOfRangeProbability";
    case ErrorKind::NegativeTime: return "NegativeTime";
    case ErrorKind::MissingSamples: return "MissingSamples";
    case ErrorKind::MissingModel: return "MissingModel";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::QuadratureNonConvergence: return "QuadratureNonConvergence";
    case ErrorKind::EnumerationTooLarge: return "EnumerationTooLarge";
    case ErrorKind::NegativeVariance: return "NegativeVariance";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::UnknownKind: return "UnknownKind";
  }
  return "Unknown";
}

ErrorCategory category_of(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::MissingSamples:
    case ErrorKind::MissingModel:
      return ErrorCategory::MissingData;
    case ErrorKind::QuadratureNonConvergence:
    case ErrorKind::EnumerationTooLarge:
    case ErrorKind::NegativeVariance:
      return ErrorCategory::Numeric;
    default:
      return ErrorCategory::Input;
  }
}

Error::Error(ErrorKind kind, std::string detail, std::optional<std::size_t> leg)
    : std::runtime_error(format_message(kind, detail, leg)),
      kind_(kind),
      leg_(leg),
      detail_(std::move(detail)) {}

}  // namespace circrel
