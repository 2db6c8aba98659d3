#include "tailcouple/error.hpp"

namespace tailcouple {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::NegativeValue: return "NegativeValue";
    case ErrorCode::TooFewObservations: return "TooFewObservations";
    case ErrorCode::RankOutOfRange: return "RankOutOfRange";
    case ErrorCode::ProbabilityOutOfRange: return "ProbabilityOutOfRange";
    case ErrorCode::ArgumentOutOfRange: return "ArgumentOutOfRange";
    case ErrorCode::TailDivergence: return "TailDivergence";
    case ErrorCode::ThresholdConflict: return "ThresholdConflict";
    case ErrorCode::ZeroThreshold: return "ZeroThreshold";
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::BothZero: return "BothZero";
    case ErrorCode::UndefinedBias: return "UndefinedBias";
    case ErrorCode::VarianceUnavailable: return "VarianceUnavailable";
    case ErrorCode::VarianceUndefined: return "VarianceUndefined";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message,
             std::optional<std::size_t> index)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code),
      index_(index) {}

}  // namespace tailcouple
