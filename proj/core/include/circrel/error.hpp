#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace circrel {

enum class ErrorKind {
  EmptyPlan,
  NegativeSlack,
  EmptySample,
  InvalidSample,
  NonpositiveRate,
  LegCountMismatch,
  LengthMismatch,
  OutOfRangeProbability,
  NegativeTime,
  MissingSamples,
  MissingModel,
  IndexOutOfRange,
  InvalidArgument,
  QuadratureNonConvergence,
  EnumerationTooLarge,
  NegativeVariance,
  ParseError,
  UnknownKind,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Coarse grouping used for process exit codes.
enum class ErrorCategory { Input, MissingData, Numeric };

ErrorCategory category_of(ErrorKind kind) noexcept;

/// Every failure raised by the library. Leg indices are 0-based in the API
/// and rendered 1-based in messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string detail, std::optional<std::size_t> leg = std::nullopt);

  ErrorKind kind() const noexcept { return kind_; }
  std::optional<std::size_t> leg() const noexcept { return leg_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::optional<std::size_t> leg_;
  std::string detail_;
};

}  // namespace circrel
