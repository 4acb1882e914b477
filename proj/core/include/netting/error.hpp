#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace netting {

// Stable reason ids; the service and the UI share this list (see docs/service.md).
enum class ErrorCode {
  // cnl_grammar
  NoLeadingItIs,
  UnknownLikelihood,
  UnknownObject,
  UnknownVerb,
  UnknownPredicate,
  TrailingGarbage,
  EmptyInput,
  DanglingReference,
  SurfaceCollision,
  ReservedPhrase,
  InvalidTerm,
  // opinion_model
  UnknownItem,
  InvalidOpinion,
  // risk_algebra
  InvalidRange,
  InvalidMapping,
  // determination_engine
  UnresolvedFactor,
  PolicyInvalid,
  OpinionNotFound,
  // exposure_calc
  CurrencyMismatch,
  Overflow,
  // cost_model
  InvalidFraction,
  InvalidParameters,
  // lifecycle_store
  NotFound,
  VersionConflict,
  UnknownSubject,
  IntegrityFailure,
  // documents
  InvalidDocument,
  InvalidDate,
};

inline constexpr int kErrorCodeCount = int(ErrorCode::InvalidDate) + 1;

std::string_view reason_id(ErrorCode code) noexcept;

// Domain error. Every failure surfaced by the core carries one of the stable
// reason ids above; `what()` holds the human-readable detail.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  std::string_view reason() const noexcept { return reason_id(code_); }

 private:
  ErrorCode code_;
};

}  // namespace netting
