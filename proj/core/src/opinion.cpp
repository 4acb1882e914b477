#include "netting/opinion.hpp"

#include <algorithm>

#include "netting/error.hpp"

namespace netting::opinion {

std::string_view name(Annotation a) {
  switch (a) {
    case Annotation::Positive: return "Positive";
    case Annotation::Neutral: return "Neutral";
    case Annotation::Negative: return "Negative";
    case Annotation::Missing: return "Missing";
  }
  return "";
}

std::string_view name(Verification v) {
  switch (v) {
    case Verification::Unverified: return "Unverified";
    case Verification::Verified: return "Verified";
    case Verification::Waived: return "Waived";
    case Verification::Failed: return "Failed";
  }
  return "";
}

std::string_view name(AssumptionKind k) {
  switch (k) {
    case AssumptionKind::Factual: return "Factual";
    case AssumptionKind::AgreementRelated: return "AgreementRelated";
    case AssumptionKind::ConditionPrecedent: return "ConditionPrecedent";
  }
  return "";
}

std::string_view name(QualificationKind k) {
  switch (k) {
    case QualificationKind::General: return "General";
    case QualificationKind::ScopeLimit: return "ScopeLimit";
    case QualificationKind::JurisdictionRisk: return "JurisdictionRisk";
  }
  return "";
}

std::string_view name(Verdict v) {
  return v == Verdict::ReasoningAcceptable ? "ReasoningAcceptable" : "ReasoningRejected";
}

namespace {

DimensionMatch member(std::string dimension, const IdSet& allowed, const std::string& value) {
  DimensionMatch d{std::move(dimension), allowed.contains(value), {}};
  if (!d.matched) d.missing.push_back(value);
  return d;
}

template <class Items, class Fn>
bool update_item(Items& items, std::string_view itemId, Fn&& fn) {
  for (auto& it : items)
    if (it.id == itemId) {
      fn(it);
      return true;
    }
  return false;
}

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::InvalidOpinion, what); }

}  // namespace

ScopeMatchResult match_scope(const LegalOpinion& opinion, const RelationshipFacts& facts) {
  const auto& scope = opinion.scope;
  ScopeMatchResult r;
  r.dimensions.push_back(member("agreementType", scope.agreementTypes, facts.agreementType));
  r.dimensions.push_back(
      member("counterpartyType", scope.counterpartyTypes, facts.counterpartyType));

  DimensionMatch tx{"transactionTypes", true, {}};
  if (!scope.transactionTypes.empty())
    for (const auto& t : facts.transactionTypes)
      if (!scope.transactionTypes.contains(t)) tx.missing.push_back(t);
  tx.matched = tx.missing.empty();
  r.dimensions.push_back(std::move(tx));

  DimensionMatch law{"governingLaw", scope.governingLaw == facts.agreementGoverningLaw, {}};
  if (!law.matched) law.missing.push_back(facts.agreementGoverningLaw);
  r.dimensions.push_back(std::move(law));

  r.matched = std::all_of(r.dimensions.begin(), r.dimensions.end(),
                          [](const DimensionMatch& d) { return d.matched; });
  return r;
}

IdSet required_jurisdictions(const RelationshipFacts& facts) {
  IdSet required{facts.incorporationJurisdiction, facts.agreementGoverningLaw};
  if (facts.branchJurisdiction) required.insert(*facts.branchJurisdiction);
  required.insert(facts.transactionGoverningLaws.begin(), facts.transactionGoverningLaws.end());
  return required;
}

CoverageResult check_jurisdiction_coverage(std::span<const LegalOpinion> opinions,
                                           const RelationshipFacts& facts) {
  IdSet covered;
  for (const auto& op : opinions)
    covered.insert(op.scope.jurisdictions.begin(), op.scope.jurisdictions.end());
  CoverageResult r;
  r.required = required_jurisdictions(facts);
  std::set_difference(r.required.begin(), r.required.end(), covered.begin(), covered.end(),
                      std::inserter(r.uncovered, r.uncovered.end()));
  return r;
}

LegalOpinion set_verification(const LegalOpinion& opinion, std::string_view itemId,
                              Verification status, std::string_view analystId, Timestamp at,
                              std::string_view notes) {
  LegalOpinion out = opinion;
  auto apply = [&](auto& item) {
    item.verification = status;
    item.verifiedBy = std::string(analystId);
    item.verifiedAt = at;
    if (!notes.empty()) item.notes = std::string(notes);
  };
  if (!update_item(out.assumptions, itemId, apply) &&
      !update_item(out.qualifications, itemId, apply))
    throw Error(ErrorCode::UnknownItem,
                "opinion '" + opinion.id + "' has no item '" + std::string(itemId) + "'");
  return out;
}

LegalOpinion set_annotation(const LegalOpinion& opinion, std::string_view itemId,
                            Annotation annotation) {
  LegalOpinion out = opinion;
  auto apply = [&](auto& item) { item.annotation = annotation; };
  if (!update_item(out.assumptions, itemId, apply) &&
      !update_item(out.qualifications, itemId, apply))
    throw Error(ErrorCode::UnknownItem,
                "opinion '" + opinion.id + "' has no item '" + std::string(itemId) + "'");
  return out;
}

void validate(const LegalOpinion& opinion, const cnl::VocabularyRegistry& registry, Date today) {
  if (opinion.id.empty()) invalid("opinion id is empty");
  if (opinion.scope.agreementTypes.empty())
    invalid("opinion '" + opinion.id + "': scope.agreementTypes is empty");
  if (opinion.scope.governingLaw.empty())
    invalid("opinion '" + opinion.id + "': scope.governingLaw is missing");
  if (opinion.issuedAt > today)
    invalid("opinion '" + opinion.id + "' issued in the future (" + opinion.issuedAt.iso() + ")");
  if (opinion.registryVersion > registry.version())
    invalid("opinion '" + opinion.id + "' needs vocabulary version " +
            std::to_string(opinion.registryVersion));
  IdSet ids;
  auto check_id = [&](const std::string& id) {
    if (id.empty() || !ids.insert(id).second)
      invalid("opinion '" + opinion.id + "': duplicate or empty item id '" + id + "'");
  };
  for (const auto& a : opinion.assumptions) check_id(a.id);
  for (const auto& q : opinion.qualifications) check_id(q.id);
  for (const auto& s : opinion.conclusion) {
    try {
      (void)cnl::render_sentence(s, registry);
    } catch (const Error& e) {
      invalid("opinion '" + opinion.id + "': " + e.what());
    }
  }
}

void validate_update(const LegalOpinion& update, const LegalOpinion& original) {
  if (update.issuedAt < original.issuedAt)
    invalid("update '" + update.id + "' issued before the opinion it updates ('" + original.id +
            "')");
}

void validate(const RelationshipFacts& facts) {
  if (facts.relationshipId.empty()) throw Error(ErrorCode::InvalidDocument, "relationshipId is empty");
  if (facts.incorporationJurisdiction.empty())
    throw Error(ErrorCode::InvalidDocument, "incorporationJurisdiction is missing");
  if (facts.agreementType.empty())
    throw Error(ErrorCode::InvalidDocument, "agreementType is missing");
  if (facts.agreementGoverningLaw.empty())
    throw Error(ErrorCode::InvalidDocument, "agreementGoverningLaw is missing");
}

}  // namespace netting::opinion
