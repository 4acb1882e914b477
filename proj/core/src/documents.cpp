#include "netting/documents.hpp"

#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>

#include "netting/error.hpp"

namespace netting::documents {

namespace {

using namespace netting::opinion;
using namespace netting::determination;

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::InvalidDocument, what); }

// Runs a reader, turning JSON access errors into InvalidDocument.
template <class Fn>
auto reading(const char* what, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const nlohmann::json::exception& e) {
    bad(std::string(what) + ": " + e.what());
  }
}

const Json& field(const Json& j, const char* key) {
  if (!j.is_object()) bad(std::string("expected an object holding '") + key + "'");
  auto it = j.find(key);
  if (it == j.end()) bad(std::string("missing field '") + key + "'");
  return *it;
}

std::string str(const Json& j, const char* key) { return field(j, key).get<std::string>(); }

std::string str_or(const Json& j, const char* key, std::string fallback = {}) {
  auto it = j.find(key);
  return (it == j.end() || it->is_null()) ? fallback : it->get<std::string>();
}

std::optional<std::string> opt_str(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<std::string>();
}

IdSet id_set(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return {};
  return it->get<IdSet>();
}

std::int64_t int_of(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_number_integer()) bad(std::string("field '") + key + "' must be an integer");
  if (v.is_number_unsigned() && v.get<std::uint64_t>() > std::uint64_t(INT64_MAX))
    throw Error(ErrorCode::Overflow, std::string("field '") + key + "' exceeds 64-bit range");
  return v.get<std::int64_t>();
}

void require_schema(const Json& j, const char* kind) {
  if (!j.is_object() || !j.contains("schemaVersion"))
    bad(std::string(kind) + " document lacks mandatory schemaVersion");
  if (!j["schemaVersion"].is_number_integer() || j["schemaVersion"].get<int>() != kSchemaVersion)
    bad(std::string(kind) + " document has unsupported schemaVersion");
}

template <class E, std::size_t N>
E enum_from(const std::string& s, const std::array<E, N>& all, const char* what) {
  for (E e : all)
    if (name(e) == s) return e;
  bad(std::string("unknown ") + what + " '" + s + "'");
}

constexpr std::array<Annotation, 4> kAnnotations{Annotation::Positive, Annotation::Neutral,
                                                 Annotation::Negative, Annotation::Missing};
constexpr std::array<Verification, 4> kVerifications{
    Verification::Unverified, Verification::Verified, Verification::Waived, Verification::Failed};
constexpr std::array<AssumptionKind, 3> kAssumptionKinds{
    AssumptionKind::Factual, AssumptionKind::AgreementRelated, AssumptionKind::ConditionPrecedent};
constexpr std::array<QualificationKind, 3> kQualificationKinds{
    QualificationKind::General, QualificationKind::ScopeLimit, QualificationKind::JurisdictionRisk};
constexpr std::array<Verdict, 2> kVerdicts{Verdict::ReasoningAcceptable, Verdict::ReasoningRejected};
constexpr std::array<AdverseDirection, 2> kDirections{AdverseDirection::Occurrence,
                                                      AdverseDirection::NonOccurrence};
constexpr std::array<MissingFactorPolicy, 2> kMissingPolicies{MissingFactorPolicy::TreatAsUnknown,
                                                              MissingFactorPolicy::Block};
constexpr std::array<EmptyIntersectionPolicy, 2> kEmptyPolicies{
    EmptyIntersectionPolicy::Block, EmptyIntersectionPolicy::WidestSentence};

template <class Kind>
Json item_to_json(const Item<Kind>& it) {
  Json j{{"id", it.id},
         {"kind", name(it.kind)},
         {"text", it.text},
         {"annotation", name(it.annotation)},
         {"verification", name(it.verification)},
         {"verifiedBy", it.verifiedBy ? Json(*it.verifiedBy) : Json(nullptr)},
         {"verifiedAt", it.verifiedAt ? Json(it.verifiedAt->iso()) : Json(nullptr)},
         {"notes", it.notes}};
  if (!it.tag.empty()) j["tag"] = it.tag;
  return j;
}

template <class Kind, std::size_t N>
Item<Kind> item_from_json(const Json& j, const std::array<Kind, N>& kinds) {
  Item<Kind> it;
  it.id = str(j, "id");
  it.kind = enum_from(str(j, "kind"), kinds, "item kind");
  it.text = str_or(j, "text");
  it.annotation = enum_from(str_or(j, "annotation", "Missing"), kAnnotations, "annotation");
  it.verification =
      enum_from(str_or(j, "verification", "Unverified"), kVerifications, "verification");
  it.verifiedBy = opt_str(j, "verifiedBy");
  if (auto at = opt_str(j, "verifiedAt")) it.verifiedAt = Timestamp::parse(*at);
  it.notes = str_or(j, "notes");
  it.tag = str_or(j, "tag");
  return it;
}

Json strings(const std::vector<std::string>& v) { return Json(v); }

}  // namespace

std::string canonical(const Json& j) { return j.dump(2) + "\n"; }

Json parse(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    bad(std::string("malformed document: ") + e.what());
  }
}

Json read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::NotFound, "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

Decimal decimal_of(const Json& j) {
  if (j.is_string()) return Decimal::parse(j.get<std::string>());
  if (j.is_number_integer()) {
    if (j.is_number_unsigned() && j.get<std::uint64_t>() > std::uint64_t(INT64_MAX))
      throw Error(ErrorCode::Overflow, "number exceeds 64-bit range");
    return Decimal(j.get<std::int64_t>());
  }
  if (j.is_number_float()) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, j.get<double>(), std::chars_format::fixed);
    if (ec != std::errc{}) bad("unrepresentable number");
    return Decimal::parse(std::string_view(buf, std::size_t(p - buf)));
  }
  bad("expected a decimal number or numeric string");
}

// --- vocabulary -------------------------------------------------------------

Json to_json(const cnl::VocabularyRegistry& registry) {
  Json objects = Json::array(), predicates = Json::array();
  for (const auto& o : registry.objects()) objects.push_back({{"id", o.id}, {"surface", o.surface}});
  for (const auto& p : registry.predicates())
    predicates.push_back({{"id", p.id}, {"surface", p.surface}});
  return {{"version", registry.version()}, {"objects", objects}, {"predicates", predicates}};
}

cnl::VocabularyRegistry registry_from_json(const Json& j) {
  return reading("vocabulary", [&] {
    std::vector<cnl::ObjectTerm> objects;
    std::vector<cnl::PredicateTerm> predicates;
    for (const auto& o : field(j, "objects")) objects.push_back({str(o, "id"), str(o, "surface")});
    for (const auto& p : field(j, "predicates"))
      predicates.push_back({str(p, "id"), str(p, "surface")});
    return cnl::VocabularyRegistry::restore(field(j, "version").get<std::uint64_t>(),
                                            std::move(objects), std::move(predicates));
  });
}

// --- sentences and opinions -------------------------------------------------

Json to_json(const cnl::Sentence& s, const cnl::VocabularyRegistry& registry) {
  return {{"text", cnl::render_sentence(s, registry)},
          {"likelihood", cnl::id(s.likelihood)},
          {"object", s.object},
          {"verb", cnl::id(s.verb)},
          {"polarity", cnl::polarity(s.verb) == cnl::Polarity::Positive ? "Positive" : "Negated"},
          {"predicate", s.predicate}};
}

cnl::Sentence sentence_from_json(const Json& j, const cnl::VocabularyRegistry& registry) {
  return reading("sentence", [&] {
    if (j.is_string()) return cnl::parse_sentence(j.get<std::string>(), registry);
    std::optional<cnl::Sentence> structured;
    if (j.contains("likelihood")) {
      structured = cnl::Sentence{cnl::likelihood_from_id(str(j, "likelihood")), str(j, "object"),
                                 cnl::verb_from_id(str(j, "verb")), str(j, "predicate")};
      (void)cnl::render_sentence(*structured, registry);
    }
    if (j.contains("text")) {
      cnl::Sentence parsed = cnl::parse_sentence(str(j, "text"), registry);
      if (structured && *structured != parsed)
        bad("sentence text and structure disagree: '" + str(j, "text") + "'");
      return parsed;
    }
    if (!structured) bad("sentence has neither text nor structure");
    return *structured;
  });
}

Json to_json(const LegalOpinion& op, const cnl::VocabularyRegistry& registry) {
  Json assumptions = Json::array(), qualifications = Json::array(), conclusion = Json::array();
  for (const auto& a : op.assumptions) assumptions.push_back(item_to_json(a));
  for (const auto& q : op.qualifications) qualifications.push_back(item_to_json(q));
  for (const auto& s : op.conclusion) conclusion.push_back(to_json(s, registry));
  return {{"schemaVersion", kSchemaVersion},
          {"id", op.id},
          {"lawFirm", op.lawFirm},
          {"issuedAt", op.issuedAt.iso()},
          {"isUpdateOf", op.isUpdateOf ? Json(*op.isUpdateOf) : Json(nullptr)},
          {"registryVersion", op.registryVersion},
          {"scope",
           {{"agreementTypes", op.scope.agreementTypes},
            {"governingLaw", op.scope.governingLaw},
            {"jurisdictions", op.scope.jurisdictions},
            {"counterpartyTypes", op.scope.counterpartyTypes},
            {"transactionTypes", op.scope.transactionTypes}}},
          {"assumptions", assumptions},
          {"qualifications", qualifications},
          {"discussion", op.discussion},
          {"conclusion", conclusion}};
}

LegalOpinion opinion_from_json(const Json& j, const cnl::VocabularyRegistry& registry) {
  return reading("opinion", [&] {
    require_schema(j, "opinion");
    LegalOpinion op;
    op.id = str(j, "id");
    op.lawFirm = str_or(j, "lawFirm");
    op.issuedAt = Date::parse(str(j, "issuedAt"));
    op.isUpdateOf = opt_str(j, "isUpdateOf");
    op.registryVersion = j.value("registryVersion", std::uint64_t{1});
    const Json& scope = field(j, "scope");
    op.scope.agreementTypes = id_set(scope, "agreementTypes");
    op.scope.governingLaw = str(scope, "governingLaw");
    op.scope.jurisdictions = id_set(scope, "jurisdictions");
    op.scope.counterpartyTypes = id_set(scope, "counterpartyTypes");
    op.scope.transactionTypes = id_set(scope, "transactionTypes");
    for (const auto& a : j.value("assumptions", Json::array()))
      op.assumptions.push_back(item_from_json(a, kAssumptionKinds));
    for (const auto& q : j.value("qualifications", Json::array()))
      op.qualifications.push_back(item_from_json(q, kQualificationKinds));
    op.discussion = str_or(j, "discussion");
    for (const auto& s : j.value("conclusion", Json::array()))
      op.conclusion.push_back(sentence_from_json(s, registry));
    return op;
  });
}

Json to_json(const RelationshipFacts& f) {
  return {{"schemaVersion", kSchemaVersion},
          {"relationshipId", f.relationshipId},
          {"counterpartyId", f.counterpartyId},
          {"counterpartyType", f.counterpartyType},
          {"incorporationJurisdiction", f.incorporationJurisdiction},
          {"branchJurisdiction", f.branchJurisdiction ? Json(*f.branchJurisdiction) : Json(nullptr)},
          {"agreementType", f.agreementType},
          {"agreementGoverningLaw", f.agreementGoverningLaw},
          {"transactionGoverningLaws", f.transactionGoverningLaws},
          {"transactionTypes", f.transactionTypes},
          {"collateralLocations", f.collateralLocations},
          {"materiallyAmended", f.materiallyAmended}};
}

RelationshipFacts facts_from_json(const Json& j) {
  return reading("facts", [&] {
    RelationshipFacts f;
    f.relationshipId = str(j, "relationshipId");
    f.counterpartyId = str_or(j, "counterpartyId");
    f.counterpartyType = str(j, "counterpartyType");
    f.incorporationJurisdiction = str(j, "incorporationJurisdiction");
    f.branchJurisdiction = opt_str(j, "branchJurisdiction");
    f.agreementType = str(j, "agreementType");
    f.agreementGoverningLaw = str(j, "agreementGoverningLaw");
    f.transactionGoverningLaws = id_set(j, "transactionGoverningLaws");
    f.transactionTypes = id_set(j, "transactionTypes");
    f.collateralLocations = id_set(j, "collateralLocations");
    f.materiallyAmended = j.value("materiallyAmended", false);
    validate(f);
    return f;
  });
}

Json to_json(const HumanAssessment& a) {
  return {{"analystId", a.analystId},
          {"assessedAt", a.assessedAt.iso()},
          {"verdict", name(a.verdict)},
          {"notes", a.notes}};
}

HumanAssessment assessment_from_json(const Json& j) {
  return reading("assessment", [&] {
    HumanAssessment a;
    a.analystId = str(j, "analystId");
    a.assessedAt = Timestamp::parse(str(j, "assessedAt"));
    a.verdict = enum_from(str(j, "verdict"), kVerdicts, "verdict");
    a.notes = str_or(j, "notes");
    return a;
  });
}

Json to_json(const ScopeMatchResult& r) {
  Json dims = Json::array();
  for (const auto& d : r.dimensions)
    dims.push_back({{"dimension", d.dimension},
                    {"result", d.matched ? "Matched" : "NotMatched"},
                    {"missing", strings(d.missing)}});
  return {{"overall", r.matched ? "Matched" : "NotMatched"}, {"dimensions", dims}};
}

Json to_json(const CoverageResult& r) {
  return {{"result", r.covered() ? "Covered" : "Uncovered"},
          {"required", r.required},
          {"uncovered", r.uncovered}};
}

// --- ranges, mappings, policies ----------------------------------------------

Json to_json(const risk::ProbRange& r) { return {{"loBp", r.lo()}, {"hiBp", r.hi()}}; }

risk::ProbRange range_from_json(const Json& j) {
  return reading("range", [&] {
    return risk::ProbRange(risk::Bp(int_of(j, "loBp")), risk::Bp(int_of(j, "hiBp")));
  });
}

Json to_json(const risk::LikelihoodMapping& m) {
  Json j = Json::object();
  for (auto l : cnl::kLikelihoods) {
    auto r = m.at(l);
    j[std::string(cnl::id(l))] = {{"loPercent", risk::bp_to_percent(r.lo())},
                                  {"hiPercent", risk::bp_to_percent(r.hi())}};
  }
  return j;
}

risk::LikelihoodMapping mapping_from_json(const Json& in) {
  return reading("mapping", [&] {
    const Json& j = in.contains("mapping") ? in["mapping"] : in;
    if (!j.is_object()) throw Error(ErrorCode::InvalidMapping, "mapping must be an object");
    auto m = risk::LikelihoodMapping::standard();
    std::size_t seen = 0;
    for (const auto& [key, value] : j.items()) {
      if (key == "schemaVersion") continue;
      cnl::Likelihood l;
      try {
        l = cnl::likelihood_from_id(key);
      } catch (const Error&) {
        throw Error(ErrorCode::InvalidMapping, "unknown likelihood '" + key + "' in mapping");
      }
      auto pct = [&](const char* k) {
        const Json& v = field(value, k);
        std::string text = v.is_string() ? v.get<std::string>() : decimal_of(v).str();
        return risk::percent_to_bp(text);
      };
      risk::Bp lo = pct("loPercent"), hi = pct("hiPercent");
      if (lo > hi) throw Error(ErrorCode::InvalidMapping, "mapping for '" + key + "' has lo > hi");
      m = m.with(l, risk::ProbRange(lo, hi));
      ++seen;
    }
    if (seen != cnl::kLikelihoods.size())
      throw Error(ErrorCode::InvalidMapping, "mapping must define all five likelihoods");
    return m;
  });
}

Json to_json(const InstitutionRiskPolicy& p) {
  Json factors = Json::array();
  for (const auto& f : p.factors)
    factors.push_back({{"id", f.id},
                       {"object", f.object},
                       {"predicate", f.predicate},
                       {"adverseDirection", name(f.adverse)},
                       {"weightBp", f.weightBp}});
  return {{"schemaVersion", kSchemaVersion},
          {"mapping", to_json(p.mapping)},
          {"factors", factors},
          {"thresholdBp", p.thresholdBp},
          {"missingFactorPolicy", name(p.missingFactorPolicy)},
          {"emptyIntersectionPolicy", name(p.emptyIntersectionPolicy)},
          {"validityPeriodDays", p.validityPeriodDays},
          {"blockingItemKinds", p.blockingItemKinds}};
}

InstitutionRiskPolicy policy_from_json(const Json& j) {
  return reading("policy", [&] {
    InstitutionRiskPolicy p;
    if (j.contains("mapping")) p.mapping = mapping_from_json(j["mapping"]);
    for (const auto& f : field(j, "factors")) {
      RiskFactor rf;
      rf.object = str(f, "object");
      rf.predicate = str(f, "predicate");
      rf.id = str_or(f, "id", rf.object + "/" + rf.predicate);
      rf.adverse = enum_from(str(f, "adverseDirection"), kDirections, "adverseDirection");
      rf.weightBp = risk::Bp(int_of(f, "weightBp"));
      p.factors.push_back(std::move(rf));
    }
    p.thresholdBp = risk::Bp(int_of(j, "thresholdBp"));
    p.missingFactorPolicy = enum_from(str_or(j, "missingFactorPolicy", "TreatAsUnknown"),
                                      kMissingPolicies, "missingFactorPolicy");
    p.emptyIntersectionPolicy = enum_from(str_or(j, "emptyIntersectionPolicy", "Block"),
                                          kEmptyPolicies, "emptyIntersectionPolicy");
    if (j.contains("validityPeriodDays")) p.validityPeriodDays = int(int_of(j, "validityPeriodDays"));
    if (j.contains("blockingItemKinds"))
      p.blockingItemKinds = j["blockingItemKinds"].get<std::set<std::string>>();
    validate(p);
    return p;
  });
}

// --- determinations -----------------------------------------------------------

Json to_json(const FactorAssessment& a, const cnl::VocabularyRegistry& registry) {
  Json used = Json::array();
  for (const auto& e : a.sentencesUsed)
    used.push_back({{"opinionId", e.opinionId},
                    {"sentence", to_json(e.sentence, registry)},
                    {"mappedRange", to_json(e.raw)},
                    {"directedRange", to_json(e.directed)}});
  return {{"factorId", a.factorId},
          {"status", name(a.status)},
          {"resolution", name(a.resolution)},
          {"adverseRange", a.adverseRange ? to_json(*a.adverseRange) : Json(nullptr)},
          {"sentencesUsed", used}};
}

Json trace_to_json(const NettingDetermination& d, const cnl::VocabularyRegistry& registry) {
  Json factors = Json::array(), reasons = Json::array(), checks = Json::array(),
       items = Json::array();
  for (const auto& a : d.factorAssessments) factors.push_back(to_json(a, registry));
  for (const auto& b : d.blockingReasons)
    reasons.push_back({{"reason", name(b.reason)}, {"detail", b.detail}});
  for (const auto& c : d.opinionChecks)
    checks.push_back({{"opinionId", c.opinionId},
                      {"issuedAt", c.issuedAt.iso()},
                      {"ageDays", c.ageDays},
                      {"expired", c.expired},
                      {"scope", to_json(c.scope)}});
  for (const auto& i : d.itemChecks)
    items.push_back({{"opinionId", i.opinionId},
                     {"itemId", i.itemId},
                     {"kind", i.kind},
                     {"verification", name(i.verification)},
                     {"blocking", i.blocking}});
  return {{"relationshipId", d.relationshipId},
          {"opinionIds", strings(d.opinionIds)},
          {"flag", name(d.flag)},
          {"overallRisk", to_json(d.overallRisk)},
          {"factorAssessments", factors},
          {"policy", to_json(d.policy)},
          {"humanAssessment", d.humanAssessment ? to_json(*d.humanAssessment) : Json(nullptr)},
          {"blockingReasons", reasons},
          {"warnings", strings(d.warnings)},
          {"determinedAt", d.determinedAt.iso()},
          {"asOfDate", d.asOfDate.iso()},
          {"opinionChecks", checks},
          {"coverage", to_json(d.coverage)},
          {"itemChecks", items},
          {"aggregation", d.aggregation},
          {"registryVersion", registry.version()}};
}

Json determination_document(const NettingDetermination& d,
                            const cnl::VocabularyRegistry& registry) {
  return {{"schemaVersion", kSchemaVersion},
          {"relationshipId", d.relationshipId},
          {"stale", false},
          {"staleReasons", Json::array()},
          {"manualOverride", false},
          {"overrideNote", ""},
          {"trace", trace_to_json(d, registry)}};
}

// --- exposures and cost model -----------------------------------------------

std::vector<exposure::Trade> portfolio_from_json(const Json& in) {
  return reading("portfolio", [&] {
    const Json& j = in.is_object() && in.contains("trades") ? in["trades"] : in;
    if (!j.is_array()) bad("portfolio must be an array of trades");
    std::vector<exposure::Trade> trades;
    for (const auto& t : j)
      trades.push_back({str(t, "id"), int_of(t, "mtmMinorUnits"), str(t, "currency")});
    return trades;
  });
}

Json to_json(const exposure::ExposureReport& r) {
  return {{"currency", r.currency},
          {"netValueToA", r.netValueToA},
          {"netExposureA", r.netExposureA},
          {"netExposureB", r.netExposureB},
          {"grossExposureA", r.grossExposureA},
          {"grossExposureB", r.grossExposureB}};
}

std::vector<cost::LevelParams> cost_params_from_json(const Json& in) {
  return reading("cost parameters", [&] {
    const Json& j = in.is_object() && in.contains("levels") ? in["levels"] : in;
    if (!j.is_array()) bad("cost parameters must be an array of levels");
    std::vector<cost::LevelParams> levels;
    const Decimal hundredth = Decimal::parse("0.01");
    for (const auto& l : j) {
      const Json& level = field(l, "level");
      levels.push_back({level.is_string() ? level.get<std::string>() : level.dump(),
                        decimal_of(field(l, "banks")), decimal_of(field(l, "opinions")),
                        decimal_of(field(l, "reviewedPct")) * hundredth,
                        decimal_of(field(l, "complexPct")) * hundredth,
                        decimal_of(field(l, "costComplexDays")),
                        decimal_of(field(l, "costSimpleDays"))});
    }
    return levels;
  });
}

Json to_json(const cost::CostReport& r) {
  Json levels = Json::array();
  for (const auto& l : r.levels)
    levels.push_back({{"level", l.level},
                      {"reviews", l.reviews.str()},
                      {"perReviewDays", l.perReviewDays.str()},
                      {"days", l.days.str()},
                      {"daysDisplay", l.days.fixed(2)},
                      {"sharePercent", r.share_percent(l.level).fixed(2)}});
  Json j{{"levels", levels},
         {"reviewsTotal", r.reviewsTotal.str()},
         {"totalDays", r.totalDays.str()},
         {"totalDaysDisplay", r.totalDays.fixed(2)},
         {"rounding", "roundHalfUp"}};
  if (r.monetized) {
    j["dayRate"] = r.dayRate->str();
    j["monetized"] = r.monetized->fixed(2);
  }
  return j;
}

}  // namespace netting::documents
