#include "shiftsig/error.hpp"

namespace shiftsig {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::DegenerateVector: return "DegenerateVector";
    case ErrorKind::NonFiniteValue: return "NonFiniteValue";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::TooManyCombinations: return "TooManyCombinations";
    case ErrorKind::InvalidSplit: return "InvalidSplit";
    case ErrorKind::EmptyResultSet: return "EmptyResultSet";
    case ErrorKind::InsufficientEligibleWords: return "InsufficientEligibleWords";
    case ErrorKind::UnknownWord: return "UnknownWord";
    case ErrorKind::EmptyRanking: return "EmptyRanking";
    case ErrorKind::DegenerateInput: return "DegenerateInput";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::ZeroVariance: return "ZeroVariance";
    case ErrorKind::SeparationDetected: return "SeparationDetected";
    case ErrorKind::SingularDesign: return "SingularDesign";
    case ErrorKind::MalformedHeader: return "MalformedHeader";
    case ErrorKind::InvalidPeriod: return "InvalidPeriod";
    case ErrorKind::BadMagic: return "BadMagic";
    case ErrorKind::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorKind::TruncatedRecord: return "TruncatedRecord";
    case ErrorKind::DuplicateWord: return "DuplicateWord";
    case ErrorKind::MalformedRow: return "MalformedRow";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

}  // namespace shiftsig
