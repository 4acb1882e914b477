#include "netting/determination.hpp"

#include <algorithm>
#include <map>

#include "netting/error.hpp"

namespace netting::determination {

namespace {

constexpr std::array<std::string_view, 12> kReasonNames{
    "ScopeNotMatched",     "JurisdictionNotCovered", "ItemFailed",
    "ItemUnverified",      "MaterialAmendment",      "OpinionExpired",
    "OpinionNotYetIssued", "HumanAssessmentMissing", "ReasoningRejected",
    "FactorMissing",       "FactorContradictory",    "RiskAboveThreshold"};

[[noreturn]] void policy_invalid(const std::string& what) {
  throw Error(ErrorCode::PolicyInvalid, what);
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) { return a / b - ((a % b != 0) && (a < 0)); }
std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return a / b + ((a % b != 0) && (a > 0)); }

}  // namespace

std::string_view name(AdverseDirection d) {
  return d == AdverseDirection::Occurrence ? "occurrence" : "non-occurrence";
}
std::string_view name(MissingFactorPolicy p) {
  return p == MissingFactorPolicy::TreatAsUnknown ? "TreatAsUnknown" : "Block";
}
std::string_view name(EmptyIntersectionPolicy p) {
  return p == EmptyIntersectionPolicy::Block ? "Block" : "WidestSentence";
}

std::string_view name(FactorStatus s) {
  switch (s) {
    case FactorStatus::Assessed: return "Assessed";
    case FactorStatus::Missing: return "Missing";
    case FactorStatus::Contradictory: return "Contradictory";
  }
  return "";
}

std::string_view name(Resolution r) {
  switch (r) {
    case Resolution::None: return "None";
    case Resolution::TreatedAsUnknown: return "TreatedAsUnknown";
    case Resolution::WidestSentence: return "WidestSentence";
    case Resolution::Blocked: return "Blocked";
  }
  return "";
}

std::string_view name(Flag f) { return f == Flag::Yes ? "Yes" : "No"; }
std::string_view name(BlockingReason r) { return kReasonNames[std::size_t(r)]; }

BlockingReason blocking_reason_from_name(std::string_view s) {
  for (std::size_t i = 0; i < kReasonNames.size(); ++i)
    if (kReasonNames[i] == s) return BlockingReason(i);
  throw Error(ErrorCode::InvalidDocument, "unknown blocking reason '" + std::string(s) + "'");
}

std::set<std::string> all_item_kinds() {
  using namespace opinion;
  return {std::string(name(AssumptionKind::Factual)),
          std::string(name(AssumptionKind::AgreementRelated)),
          std::string(name(AssumptionKind::ConditionPrecedent)),
          std::string(name(QualificationKind::General)),
          std::string(name(QualificationKind::ScopeLimit)),
          std::string(name(QualificationKind::JurisdictionRisk))};
}

void validate(const InstitutionRiskPolicy& policy) {
  if (policy.factors.empty()) policy_invalid("policy has no risk factors");
  std::int64_t total = 0;
  std::set<std::pair<std::string, std::string>> pairs;
  std::set<std::string> ids;
  for (const auto& f : policy.factors) {
    if (f.weightBp < 0 || f.weightBp > risk::kCertain)
      policy_invalid("factor '" + f.id + "' weight out of range");
    total += f.weightBp;
    if (!pairs.emplace(f.object, f.predicate).second)
      policy_invalid("duplicate risk factor (" + f.object + ", " + f.predicate + ")");
    if (f.id.empty() || !ids.insert(f.id).second)
      policy_invalid("duplicate or empty factor id '" + f.id + "'");
  }
  if (total != risk::kCertain)
    policy_invalid("factor weights sum to " + std::to_string(total) + " bp, expected 10000");
  if (policy.thresholdBp < 0 || policy.thresholdBp > risk::kCertain)
    policy_invalid("thresholdBp out of [0,10000]");
  if (policy.validityPeriodDays < 0) policy_invalid("validityPeriodDays is negative");
  auto known = all_item_kinds();
  for (const auto& k : policy.blockingItemKinds)
    if (!known.contains(k)) policy_invalid("unknown item kind '" + k + "'");
}

FactorAssessment factor_range(std::span<const CitedSentence> conclusion, const RiskFactor& factor,
                              const risk::LikelihoodMapping& mapping) {
  FactorAssessment a;
  a.factorId = factor.id;
  std::optional<ProbRange> acc = ProbRange::full();
  for (const auto& cited : conclusion) {
    const auto& s = cited.sentence;
    if (s.object != factor.object || s.predicate != factor.predicate) continue;
    ProbRange raw = risk::map_likelihood(s.likelihood, mapping);
    ProbRange directed = cnl::polarity(s.verb) == cnl::Polarity::Positive ? raw : risk::complement(raw);
    a.sentencesUsed.push_back({cited.opinionId, s, raw, directed});
    if (acc) acc = risk::intersect(*acc, directed);
  }
  if (a.sentencesUsed.empty()) {
    a.status = FactorStatus::Missing;
  } else if (!acc) {
    a.status = FactorStatus::Contradictory;
  } else {
    a.status = FactorStatus::Assessed;
    a.adverseRange = factor.adverse == AdverseDirection::Occurrence ? *acc : risk::complement(*acc);
  }
  return a;
}

FactorAssessment factor_range(std::span<const cnl::Sentence> conclusion, const RiskFactor& factor,
                              const risk::LikelihoodMapping& mapping) {
  std::vector<CitedSentence> cited;
  cited.reserve(conclusion.size());
  for (const auto& s : conclusion) cited.push_back({{}, s});
  return factor_range(std::span<const CitedSentence>(cited), factor, mapping);
}

FactorAssessment resolve(FactorAssessment a, const InstitutionRiskPolicy& policy) {
  if (a.status == FactorStatus::Missing) {
    a.adverseRange = ProbRange::full();
    a.resolution = policy.missingFactorPolicy == MissingFactorPolicy::TreatAsUnknown
                       ? Resolution::TreatedAsUnknown
                       : Resolution::Blocked;
  } else if (a.status == FactorStatus::Contradictory) {
    if (policy.emptyIntersectionPolicy == EmptyIntersectionPolicy::WidestSentence) {
      const SentenceEvidence* widest = &a.sentencesUsed.front();
      for (const auto& e : a.sentencesUsed) {
        if (e.directed.width() > widest->directed.width() ||
            (e.directed.width() == widest->directed.width() && e.directed.hi() > widest->directed.hi()))
          widest = &e;
      }
      auto it = std::find_if(policy.factors.begin(), policy.factors.end(),
                             [&](const RiskFactor& f) { return f.id == a.factorId; });
      bool occurrence = it == policy.factors.end() || it->adverse == AdverseDirection::Occurrence;
      a.adverseRange = occurrence ? widest->directed : risk::complement(widest->directed);
      a.resolution = Resolution::WidestSentence;
    } else {
      a.adverseRange = ProbRange::full();
      a.resolution = Resolution::Blocked;
    }
  }
  return a;
}

ProbRange LinearAggregator::aggregate(std::span<const FactorAssessment> assessments,
                                      const InstitutionRiskPolicy& policy) const {
  std::int64_t lo_sum = 0, hi_sum = 0;
  for (const auto& f : policy.factors) {
    auto it = std::find_if(assessments.begin(), assessments.end(),
                           [&](const FactorAssessment& a) { return a.factorId == f.id; });
    if (it == assessments.end())
      throw Error(ErrorCode::UnresolvedFactor, "no assessment for factor '" + f.id + "'");
    if (!it->adverseRange)
      throw Error(ErrorCode::UnresolvedFactor,
                  "factor '" + f.id + "' is " + std::string(determination::name(it->status)) + " and unresolved");
    lo_sum += std::int64_t(f.weightBp) * it->adverseRange->lo();
    hi_sum += std::int64_t(f.weightBp) * it->adverseRange->hi();
  }
  return ProbRange(Bp(floor_div(lo_sum, risk::kCertain)), Bp(ceil_div(hi_sum, risk::kCertain)));
}

ProbRange aggregate_risk(std::span<const FactorAssessment> assessments,
                         const InstitutionRiskPolicy& policy) {
  return LinearAggregator{}.aggregate(assessments, policy);
}

bool NettingDetermination::has_reason(BlockingReason r) const {
  return std::any_of(blockingReasons.begin(), blockingReasons.end(),
                     [&](const Blocker& b) { return b.reason == r; });
}

NettingDetermination determine(const DeterminationInput& input) {
  return determine(input, LinearAggregator{});
}

NettingDetermination determine(const DeterminationInput& in, const Aggregator& aggregator) {
  validate(in.policy);
  if (in.opinions.empty())
    throw Error(ErrorCode::OpinionNotFound, "no opinion supplied for relationship '" +
                                                in.facts.relationshipId + "'");

  NettingDetermination d;
  d.relationshipId = in.facts.relationshipId;
  d.policy = in.policy;
  d.humanAssessment = in.humanAssessment;
  d.asOfDate = in.asOfDate;
  d.determinedAt = in.determinedAt.value_or(Timestamp::start_of(in.asOfDate));
  d.aggregation = std::string(aggregator.name());
  auto block = [&](BlockingReason r, std::string detail) {
    d.blockingReasons.push_back({r, std::move(detail)});
  };

  // (a) scope and (d) validity, per opinion.
  bool any_scope = false;
  for (const auto& op : in.opinions) {
    d.opinionIds.push_back(op.id);
    OpinionCheck c;
    c.opinionId = op.id;
    c.issuedAt = op.issuedAt;
    c.ageDays = days_between(op.issuedAt, in.asOfDate);
    c.expired = c.ageDays > in.policy.validityPeriodDays;
    c.scope = opinion::match_scope(op, in.facts);
    any_scope = any_scope || c.scope.matched;
    d.opinionChecks.push_back(std::move(c));
  }
  if (!any_scope) block(BlockingReason::ScopeNotMatched, "no opinion scope matches the relationship");

  // (b) jurisdictions.
  d.coverage = opinion::check_jurisdiction_coverage(in.opinions, in.facts);
  if (!d.coverage.covered()) {
    std::string missing;
    for (const auto& j : d.coverage.uncovered) missing += (missing.empty() ? "" : ",") + j;
    block(BlockingReason::JurisdictionNotCovered, "uncovered: " + missing);
  }

  // (c) assumptions and qualifications.
  if (in.facts.materiallyAmended)
    block(BlockingReason::MaterialAmendment, "agreement materially amended");
  auto check_items = [&](const std::string& opId, const auto& items) {
    for (const auto& item : items) {
      ItemCheck ic{opId, item.id, std::string(opinion::name(item.kind)), item.verification, false};
      if (in.facts.materiallyAmended && item.tag == opinion::kNoMaterialAmendmentTag)
        ic.verification = opinion::Verification::Failed;
      if (ic.verification == opinion::Verification::Failed) {
        ic.blocking = true;
        block(BlockingReason::ItemFailed, opId + "/" + item.id);
      } else if (ic.verification == opinion::Verification::Unverified &&
                 in.policy.blockingItemKinds.contains(ic.kind)) {
        ic.blocking = true;
        block(BlockingReason::ItemUnverified, opId + "/" + item.id);
      }
      d.itemChecks.push_back(std::move(ic));
    }
  };
  for (const auto& op : in.opinions) {
    check_items(op.id, op.assumptions);
    check_items(op.id, op.qualifications);
  }

  for (const auto& c : d.opinionChecks) {
    if (c.ageDays < 0)
      block(BlockingReason::OpinionNotYetIssued, c.opinionId + " issued " + c.issuedAt.iso());
    else if (c.expired)
      block(BlockingReason::OpinionExpired, c.opinionId + " is " + std::to_string(c.ageDays) +
                                                " days old (validity " +
                                                std::to_string(in.policy.validityPeriodDays) + ")");
  }

  // (e) human sign-off on the reasoning.
  if (!in.humanAssessment)
    block(BlockingReason::HumanAssessmentMissing, "no recorded assessment of the legal reasoning");
  else if (in.humanAssessment->verdict != opinion::Verdict::ReasoningAcceptable)
    block(BlockingReason::ReasoningRejected, "assessed by " + in.humanAssessment->analystId);

  // (f) weighted risk.
  std::vector<CitedSentence> conclusion;
  for (const auto& op : in.opinions)
    for (const auto& s : op.conclusion) conclusion.push_back({op.id, s});
  for (const auto& f : in.policy.factors) {
    FactorAssessment a = resolve(factor_range(conclusion, f, in.policy.mapping), in.policy);
    if (a.resolution == Resolution::TreatedAsUnknown)
      d.warnings.push_back("factor '" + f.id + "' missing; treated as unknown [0,10000]");
    if (a.resolution == Resolution::WidestSentence)
      d.warnings.push_back("factor '" + f.id + "' contradictory; widest sentence used");
    if (a.resolution == Resolution::Blocked)
      block(a.status == FactorStatus::Missing ? BlockingReason::FactorMissing
                                              : BlockingReason::FactorContradictory,
            f.id);
    d.factorAssessments.push_back(std::move(a));
  }
  d.overallRisk = aggregator.aggregate(d.factorAssessments, in.policy);
  if (d.overallRisk.hi() > in.policy.thresholdBp)
    block(BlockingReason::RiskAboveThreshold,
          "upper bound " + std::to_string(d.overallRisk.hi()) + " bp > threshold " +
              std::to_string(in.policy.thresholdBp) + " bp");

  d.flag = d.blockingReasons.empty() ? Flag::Yes : Flag::No;
  return d;
}

}  // namespace netting::determination
