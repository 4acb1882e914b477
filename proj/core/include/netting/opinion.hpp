#pragma once

// Five-part legal opinion (scope, assumptions, qualifications, discussion,
// conclusion), the trading-relationship fact pattern it is applied to, and
// the scope / jurisdiction-coverage tests run during netting determination.

#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "netting/calendar.hpp"
#include "netting/cnl.hpp"

namespace netting::opinion {

using IdSet = std::set<std::string>;

enum class Annotation { Positive, Neutral, Negative, Missing };
enum class Verification { Unverified, Verified, Waived, Failed };
enum class AssumptionKind { Factual, AgreementRelated, ConditionPrecedent };
enum class QualificationKind { General, ScopeLimit, JurisdictionRisk };
enum class Verdict { ReasoningAcceptable, ReasoningRejected };

std::string_view name(Annotation a);
std::string_view name(Verification v);
std::string_view name(AssumptionKind k);
std::string_view name(QualificationKind k);
std::string_view name(Verdict v);

// Items carrying this tag are the standard "no provision has been altered in
// any material respect" assumption; materially amended facts fail them.
inline constexpr std::string_view kNoMaterialAmendmentTag = "no-material-amendment";

template <class Kind>
struct Item {
  std::string id;
  Kind kind{};
  std::string text;
  Annotation annotation = Annotation::Missing;
  Verification verification = Verification::Unverified;
  std::optional<std::string> verifiedBy;
  std::optional<Timestamp> verifiedAt;
  std::string notes;
  std::string tag;
  friend bool operator==(const Item&, const Item&) = default;
};

using AssumptionItem = Item<AssumptionKind>;
using QualificationItem = Item<QualificationKind>;

struct OpinionScope {
  IdSet agreementTypes;
  std::string governingLaw;
  IdSet jurisdictions;
  IdSet counterpartyTypes;
  IdSet transactionTypes;  // empty: every transaction type
  friend bool operator==(const OpinionScope&, const OpinionScope&) = default;
};

struct LegalOpinion {
  std::string id;
  std::string lawFirm;
  Date issuedAt;
  std::optional<std::string> isUpdateOf;
  OpinionScope scope;
  std::vector<AssumptionItem> assumptions;
  std::vector<QualificationItem> qualifications;
  std::string discussion;  // verbatim; never interpreted
  std::vector<cnl::Sentence> conclusion;
  std::uint64_t registryVersion = 1;
  friend bool operator==(const LegalOpinion&, const LegalOpinion&) = default;
};

struct RelationshipFacts {
  std::string relationshipId;
  std::string counterpartyId;
  std::string counterpartyType;
  std::string incorporationJurisdiction;
  std::optional<std::string> branchJurisdiction;
  std::string agreementType;
  std::string agreementGoverningLaw;
  // Includes laws of any ancillary contract needed to effect the netting.
  IdSet transactionGoverningLaws;
  IdSet transactionTypes;
  IdSet collateralLocations;
  bool materiallyAmended = false;
  friend bool operator==(const RelationshipFacts&, const RelationshipFacts&) = default;
};

struct HumanAssessment {
  std::string analystId;
  Timestamp assessedAt;
  Verdict verdict = Verdict::ReasoningRejected;
  std::string notes;
  friend bool operator==(const HumanAssessment&, const HumanAssessment&) = default;
};

struct DimensionMatch {
  std::string dimension;  // agreementType | counterpartyType | transactionTypes | governingLaw
  bool matched = false;
  std::vector<std::string> missing;
};

struct ScopeMatchResult {
  std::vector<DimensionMatch> dimensions;
  bool matched = false;
};

struct CoverageResult {
  IdSet required;
  IdSet uncovered;
  bool covered() const { return uncovered.empty(); }
};

ScopeMatchResult match_scope(const LegalOpinion& opinion, const RelationshipFacts& facts);

// Jurisdictions that must be opined on: incorporation, branch, transaction laws
// and the agreement's governing law.
IdSet required_jurisdictions(const RelationshipFacts& facts);
CoverageResult check_jurisdiction_coverage(std::span<const LegalOpinion> opinions,
                                           const RelationshipFacts& facts);

// Copy of `opinion` with the item's verification updated. Throws UnknownItem.
LegalOpinion set_verification(const LegalOpinion& opinion, std::string_view itemId,
                              Verification status, std::string_view analystId, Timestamp at,
                              std::string_view notes = {});
LegalOpinion set_annotation(const LegalOpinion& opinion, std::string_view itemId,
                            Annotation annotation);

// Structural checks; throws InvalidOpinion.
void validate(const LegalOpinion& opinion, const cnl::VocabularyRegistry& registry, Date today);
void validate_update(const LegalOpinion& update, const LegalOpinion& original);
void validate(const RelationshipFacts& facts);

}  // namespace netting::opinion
