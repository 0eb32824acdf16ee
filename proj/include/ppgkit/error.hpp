#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ppgkit {

enum class ErrorCode {
  RowNotStochastic,
  RewardOutOfRange,
  InitialDistributionNotTraversal,
  BadGamma,
  DimensionMismatch,
  InvalidPolicy,
  SingularSystem,
  EmptyVector,
  BadPartition,
  NonFiniteAdvantage,
  InfiniteGap,
  ZeroRhoComponent,
  AllActionsPiOptimal,
  NoImprovementFixedPointNotOptimal,
  BadSpec,
  BadSchedule,
  IoError,
  ParseError,
  ValidationFailed,
  BadFlag,
};

std::string_view to_string(ErrorCode code);

/// Every failure in the library is reported as a ppgkit::Error carrying a
/// machine-readable code next to the human-readable message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ppgkit
