#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tailcouple {

enum class ErrorCode {
  EmptyInput,
  NonFiniteValue,
  NegativeValue,
  TooFewObservations,
  RankOutOfRange,
  ProbabilityOutOfRange,
  ArgumentOutOfRange,
  TailDivergence,
  ThresholdConflict,
  ZeroThreshold,
  DivisionByZero,
  BothZero,
  UndefinedBias,
  VarianceUnavailable,
  VarianceUndefined,
  GridTooCoarse,
  ParseError,
  InvalidConfig,
  IoError,
};

std::string_view to_string(ErrorCode code);

// All library failures are reported through this type. `index()` carries the
// offending position for input-validation errors (0-based element index, or
// 1-based line number for CSV parsing).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::size_t> index = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> index() const noexcept { return index_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> index_;
};

}  // namespace tailcouple
