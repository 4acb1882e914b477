#pragma once

// Binary netting determination: per-risk-factor probability ranges from the
// opinion conclusions, weighted aggregation under an institution policy, and
// the gate checks (scope, jurisdictions, items, expiry, human sign-off,
// threshold). The returned NettingDetermination is its own audit trace.

#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "netting/calendar.hpp"
#include "netting/cnl.hpp"
#include "netting/opinion.hpp"
#include "netting/risk_algebra.hpp"

namespace netting::determination {

using risk::Bp;
using risk::ProbRange;

enum class AdverseDirection { Occurrence, NonOccurrence };
enum class MissingFactorPolicy { TreatAsUnknown, Block };
enum class EmptyIntersectionPolicy { Block, WidestSentence };

std::string_view name(AdverseDirection d);
std::string_view name(MissingFactorPolicy p);
std::string_view name(EmptyIntersectionPolicy p);

struct RiskFactor {
  std::string id;
  std::string object;     // ObjectTerm id
  std::string predicate;  // PredicateTerm id
  AdverseDirection adverse = AdverseDirection::Occurrence;
  Bp weightBp = 0;
  friend bool operator==(const RiskFactor&, const RiskFactor&) = default;
};

// Item kinds (assumption or qualification kind names) whose Unverified items block.
std::set<std::string> all_item_kinds();

struct InstitutionRiskPolicy {
  risk::LikelihoodMapping mapping = risk::LikelihoodMapping::standard();
  std::vector<RiskFactor> factors;
  Bp thresholdBp = 0;
  MissingFactorPolicy missingFactorPolicy = MissingFactorPolicy::TreatAsUnknown;
  EmptyIntersectionPolicy emptyIntersectionPolicy = EmptyIntersectionPolicy::Block;
  int validityPeriodDays = 365;
  std::set<std::string> blockingItemKinds = all_item_kinds();
  friend bool operator==(const InstitutionRiskPolicy&, const InstitutionRiskPolicy&) = default;
};

// Throws PolicyInvalid: weights must sum to exactly 10000, threshold in
// [0,10000], factors non-empty with unique (object, predicate) pairs.
void validate(const InstitutionRiskPolicy& policy);

enum class FactorStatus { Assessed, Missing, Contradictory };
enum class Resolution { None, TreatedAsUnknown, WidestSentence, Blocked };

std::string_view name(FactorStatus s);
std::string_view name(Resolution r);

struct CitedSentence {
  std::string opinionId;
  cnl::Sentence sentence;
};

struct SentenceEvidence {
  std::string opinionId;
  cnl::Sentence sentence;
  ProbRange raw;       // mapped likelihood
  ProbRange directed;  // probability that the predicate holds
};

struct FactorAssessment {
  std::string factorId;
  std::vector<SentenceEvidence> sentencesUsed;
  std::optional<ProbRange> adverseRange;  // probability the adverse event occurs
  FactorStatus status = FactorStatus::Missing;
  Resolution resolution = Resolution::None;
};

FactorAssessment factor_range(std::span<const CitedSentence> conclusion, const RiskFactor& factor,
                              const risk::LikelihoodMapping& mapping);
FactorAssessment factor_range(std::span<const cnl::Sentence> conclusion, const RiskFactor& factor,
                              const risk::LikelihoodMapping& mapping);

// Applies the policy's missing / empty-intersection rules. Block leaves the
// factor at [0,10000] with resolution Blocked so the aggregate stays conservative.
FactorAssessment resolve(FactorAssessment assessment, const InstitutionRiskPolicy& policy);

// Combines per-factor adverse ranges into one overall range.
class Aggregator {
 public:
  virtual ~Aggregator() = default;
  virtual std::string_view name() const = 0;
  virtual ProbRange aggregate(std::span<const FactorAssessment> assessments,
                              const InstitutionRiskPolicy& policy) const = 0;
};

// [floor(sum w*lo / 10000), ceil(sum w*hi / 10000)] in exact integer arithmetic.
class LinearAggregator final : public Aggregator {
 public:
  std::string_view name() const override { return "linear"; }
  ProbRange aggregate(std::span<const FactorAssessment> assessments,
                      const InstitutionRiskPolicy& policy) const override;
};

// Throws UnresolvedFactor if a policy factor has no assessment or no range.
ProbRange aggregate_risk(std::span<const FactorAssessment> assessments,
                         const InstitutionRiskPolicy& policy);

enum class Flag { No, Yes };

enum class BlockingReason {
  ScopeNotMatched,
  JurisdictionNotCovered,
  ItemFailed,
  ItemUnverified,
  MaterialAmendment,
  OpinionExpired,
  OpinionNotYetIssued,
  HumanAssessmentMissing,
  ReasoningRejected,
  FactorMissing,
  FactorContradictory,
  RiskAboveThreshold,
};

inline constexpr int kBlockingReasonCount = int(BlockingReason::RiskAboveThreshold) + 1;

std::string_view name(Flag f);
std::string_view name(BlockingReason r);
BlockingReason blocking_reason_from_name(std::string_view s);

struct Blocker {
  BlockingReason reason;
  std::string detail;
  friend bool operator==(const Blocker&, const Blocker&) = default;
};

struct OpinionCheck {
  std::string opinionId;
  Date issuedAt;
  long ageDays = 0;
  bool expired = false;
  opinion::ScopeMatchResult scope;
};

struct ItemCheck {
  std::string opinionId;
  std::string itemId;
  std::string kind;
  opinion::Verification verification;  // effective status after fact checks
  bool blocking = false;
};

struct NettingDetermination {
  std::string relationshipId;
  std::vector<std::string> opinionIds;
  Flag flag = Flag::No;
  ProbRange overallRisk = ProbRange::full();
  std::vector<FactorAssessment> factorAssessments;
  InstitutionRiskPolicy policy;
  std::optional<opinion::HumanAssessment> humanAssessment;
  std::vector<Blocker> blockingReasons;
  std::vector<std::string> warnings;
  Timestamp determinedAt;
  Date asOfDate;
  // Trace of the gate computations.
  std::vector<OpinionCheck> opinionChecks;
  opinion::CoverageResult coverage;
  std::vector<ItemCheck> itemChecks;
  std::string aggregation;

  bool has_reason(BlockingReason r) const;
};

struct DeterminationInput {
  opinion::RelationshipFacts facts;
  std::vector<opinion::LegalOpinion> opinions;
  InstitutionRiskPolicy policy;
  std::optional<opinion::HumanAssessment> humanAssessment;
  Date asOfDate;
  std::optional<Timestamp> determinedAt;  // defaults to asOfDate 00:00:00Z
};

// Throws PolicyInvalid or OpinionNotFound (no opinions supplied).
NettingDetermination determine(const DeterminationInput& input);
NettingDetermination determine(const DeterminationInput& input, const Aggregator& aggregator);

}  // namespace netting::determination
