#include "netting/error.hpp"

namespace netting {

std::string_view reason_id(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NoLeadingItIs: return "NoLeadingItIs";
    case ErrorCode::UnknownLikelihood: return "UnknownLikelihood";
    case ErrorCode::UnknownObject: return "UnknownObject";
    case ErrorCode::UnknownVerb: return "UnknownVerb";
    case ErrorCode::UnknownPredicate: return "UnknownPredicate";
    case ErrorCode::TrailingGarbage: return "TrailingGarbage";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::DanglingReference: return "DanglingReference";
    case ErrorCode::SurfaceCollision: return "SurfaceCollision";
    case ErrorCode::ReservedPhrase: return "ReservedPhrase";
    case ErrorCode::InvalidTerm: return "InvalidTerm";
    case ErrorCode::UnknownItem: return "UnknownItem";
    case ErrorCode::InvalidOpinion: return "InvalidOpinion";
    case ErrorCode::InvalidRange: return "InvalidRange";
    case ErrorCode::InvalidMapping: return "InvalidMapping";
    case ErrorCode::UnresolvedFactor: return "UnresolvedFactor";
    case ErrorCode::PolicyInvalid: return "PolicyInvalid";
    case ErrorCode::OpinionNotFound: return "OpinionNotFound";
    case ErrorCode::CurrencyMismatch: return "CurrencyMismatch";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::InvalidFraction: return "InvalidFraction";
    case ErrorCode::InvalidParameters: return "InvalidParameters";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::VersionConflict: return "VersionConflict";
    case ErrorCode::UnknownSubject: return "UnknownSubject";
    case ErrorCode::IntegrityFailure: return "IntegrityFailure";
    case ErrorCode::InvalidDocument: return "InvalidDocument";
    case ErrorCode::InvalidDate: return "InvalidDate";
  }
  return "Unknown";
}

}  // namespace netting
