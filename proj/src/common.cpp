#include "tropdeg/error.hpp"
#include "tropdeg/rational.hpp"

#include <cmath>

namespace tropdeg {

std::string_view error_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::RankMismatch: return "RankMismatch";
    case ErrorCode::ResolutionTooSmall: return "ResolutionTooSmall";
    case ErrorCode::NotInSiegelSpace: return "NotInSiegelSpace";
    case ErrorCode::InvalidT: return "InvalidT";
    case ErrorCode::GenusZero: return "GenusZero";
    case ErrorCode::GenusTooSmall: return "GenusTooSmall";
    case ErrorCode::DisconnectedGraph: return "DisconnectedGraph";
    case ErrorCode::DisconnectedSpecialFiber: return "DisconnectedSpecialFiber";
    case ErrorCode::MissingPlaceData: return "MissingPlaceData";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::TruncationFailure: return "TruncationFailure";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::IllConditionedFit: return "IllConditionedFit";
    case ErrorCode::SolveFailure: return "SolveFailure";
  }
  return "Unknown";
}

bool is_validation_error(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::TruncationFailure:
    case ErrorCode::NonFinite:
    case ErrorCode::IllConditionedFit:
    case ErrorCode::SolveFailure:
      return false;
    default:
      return true;
  }
}

Rational rational_from_double(double x) {
  if (!std::isfinite(x)) fail(ErrorCode::InvalidArgument, "non-finite value cannot be made exact");
  if (x == 0.0) return Rational(0);
  int exponent = 0;
  const double mantissa = std::frexp(x, &exponent);  // x = mantissa * 2^exponent
  // 53-bit integer mantissa
  const auto scaled = static_cast<long long>(std::ldexp(mantissa, 53));
  exponent -= 53;
  Rational q{Integer(scaled)};
  if (exponent > 0) {
    q *= Rational(Integer(1) << exponent);
  } else if (exponent < 0) {
    q /= Rational(Integer(1) << (-exponent));
  }
  return q;
}

std::string to_string(const Rational& q) {
  if (denominator_of(q) == 1) return numerator_of(q).str();
  return numerator_of(q).str() + "/" + denominator_of(q).str();
}

}  // namespace tropdeg
