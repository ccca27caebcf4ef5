#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tropdeg {

enum class ErrorCode {
  // validation
  InvalidArgument,
  NotSymmetric,
  NotPositiveDefinite,
  RankMismatch,
  ResolutionTooSmall,
  NotInSiegelSpace,
  InvalidT,
  GenusZero,
  GenusTooSmall,
  DisconnectedGraph,
  DisconnectedSpecialFiber,
  MissingPlaceData,
  InvalidSpec,
  ParseError,
  // numerical
  TruncationFailure,
  NonFinite,
  IllConditionedFit,
  SolveFailure,
};

std::string_view error_name(ErrorCode code) noexcept;

/// True for errors caused by bad input; false for numerical non-convergence.
bool is_validation_error(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace tropdeg
