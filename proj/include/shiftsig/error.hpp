#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace shiftsig {

enum class ErrorKind {
  EmptyInput,
  DimensionMismatch,
  DegenerateVector,
  NonFiniteValue,
  InvalidConfig,
  TooManyCombinations,
  InvalidSplit,
  EmptyResultSet,
  InsufficientEligibleWords,
  UnknownWord,
  EmptyRanking,
  DegenerateInput,
  LengthMismatch,
  ZeroVariance,
  SeparationDetected,
  SingularDesign,
  MalformedHeader,
  InvalidPeriod,
  BadMagic,
  UnsupportedVersion,
  TruncatedRecord,
  DuplicateWord,
  MalformedRow,
  Io,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries one of the kinds above so
/// callers (and tests) can branch on the condition rather than the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace shiftsig
