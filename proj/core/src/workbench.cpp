#include "netting/workbench.hpp"

#include <algorithm>

#include "netting/error.hpp"

namespace netting::workbench {

using store::EntityKind;

namespace {

std::optional<std::string> opt(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<std::string>();
}

const Json& need(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    throw Error(ErrorCode::InvalidDocument, std::string("request lacks '") + key + "'");
  return j[key];
}

Json audit_json(const std::vector<store::AuditEntry>& entries) {
  Json out = Json::array();
  for (const auto& e : entries)
    out.push_back({{"sequence", e.sequence},
                   {"actor", e.actor},
                   {"action", e.action},
                   {"timestamp", e.timestamp.iso()},
                   {"entityKind", e.entityKind},
                   {"entityId", e.entityId},
                   {"version", e.version},
                   {"beforeHash", e.beforeHash},
                   {"afterHash", e.afterHash},
                   {"note", e.note},
                   {"prevHash", e.prevHash},
                   {"entryHash", e.entryHash}});
  return out;
}

}  // namespace

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotFound:
    case ErrorCode::OpinionNotFound:
      return 404;
    case ErrorCode::VersionConflict:
      return 409;
    case ErrorCode::InvalidDocument:
    case ErrorCode::InvalidDate:
      return 400;
    default:
      return 422;
  }
}

Json error_body(const std::exception& e) {
  if (const auto* pe = dynamic_cast<const cnl::ParseError*>(&e))
    return {{"error", pe->reason()},
            {"message", pe->what()},
            {"span", {{"begin", pe->span().begin}, {"end", pe->span().end}, {"text", pe->span().text}}}};
  if (const auto* de = dynamic_cast<const Error*>(&e))
    return {{"error", de->reason()}, {"message", de->what()}};
  return {{"error", "InternalError"}, {"message", e.what()}};
}

Json reason_ids() {
  Json errors = Json::array(), blocking = Json::array();
  for (int i = 0; i < kErrorCodeCount; ++i) errors.push_back(reason_id(ErrorCode(i)));
  for (int i = 0; i < determination::kBlockingReasonCount; ++i)
    blocking.push_back(determination::name(determination::BlockingReason(i)));
  return {{"errors", errors}, {"blockingReasons", blocking}};
}

Json parse_text(const std::string& text, const cnl::VocabularyRegistry& registry) {
  Json j = documents::to_json(cnl::parse_sentence(text, registry), registry);
  j["registryVersion"] = registry.version();
  return j;
}

std::string render_document(const Json& sentence, const cnl::VocabularyRegistry& registry) {
  // Structure wins; the text field, when present, must agree.
  return cnl::render_sentence(documents::sentence_from_json(sentence, registry), registry);
}

Json run_determination(const determination::DeterminationInput& input,
                       const cnl::VocabularyRegistry& registry) {
  return documents::trace_to_json(determination::determine(input), registry);
}

Json exposures(const Json& portfolio) {
  auto trades = documents::portfolio_from_json(portfolio);
  return documents::to_json(exposure::compute_exposures(trades));
}

Json cost_model(const Json& params, std::optional<Decimal> dayRate) {
  auto levels = documents::cost_params_from_json(params);
  return documents::to_json(cost::total_cost(levels, dayRate));
}

determination::InstitutionRiskPolicy apply_overrides(determination::InstitutionRiskPolicy p,
                                                     const Json& o) {
  if (o.is_null()) return p;
  Json doc = documents::to_json(p);
  for (const char* key : {"thresholdBp", "missingFactorPolicy", "emptyIntersectionPolicy",
                          "validityPeriodDays", "blockingItemKinds"})
    if (o.contains(key)) doc[key] = o[key];
  if (o.contains("mapping"))
    for (const auto& [k, v] : o["mapping"].items()) doc["mapping"][k] = v;
  if (o.contains("weights"))
    for (auto& f : doc["factors"])
      if (o["weights"].contains(f["id"].get<std::string>()))
        f["weightBp"] = o["weights"][f["id"].get<std::string>()];
  return documents::policy_from_json(doc);
}

// ---------------------------------------------------------------------------

Json Workbench::vocabulary() const {
  Json j = documents::to_json(store_.registry());
  Json likelihoods = Json::array(), verbs = Json::array();
  for (auto l : cnl::kLikelihoods)
    likelihoods.push_back({{"id", cnl::id(l)}, {"surface", cnl::phrase(l)}});
  for (auto v : cnl::kVerbs)
    verbs.push_back({{"id", cnl::id(v)},
                     {"surface", cnl::phrase(v)},
                     {"polarity", cnl::polarity(v) == cnl::Polarity::Positive ? "Positive" : "Negated"}});
  j["likelihoods"] = likelihoods;
  j["verbs"] = verbs;
  return j;
}

Json Workbench::add_term(const Json& r, const std::string& actor) {
  auto reg = store_.registry();
  std::string kind = need(r, "kind").get<std::string>();
  std::string id = need(r, "id").get<std::string>();
  std::string surface = need(r, "surface").get<std::string>();
  cnl::VocabularyRegistry next =
      kind == "object"      ? reg.extend(cnl::ObjectTerm{id, surface})
      : kind == "predicate" ? reg.extend(cnl::PredicateTerm{id, surface})
                            : throw Error(ErrorCode::InvalidDocument,
                                          "term kind must be 'object' or 'predicate'");
  store_.save_registry(next, actor);
  return documents::to_json(next);
}

Json Workbench::parse(const Json& r) const {
  return parse_text(need(r, "text").get<std::string>(), store_.registry());
}

Json Workbench::render(const Json& r) const {
  auto reg = store_.registry();
  const Json& s = r.contains("sentence") ? r["sentence"] : r;
  return {{"text", render_document(s, reg)}};
}

Json Workbench::put_opinion(const std::string& id, const Json& doc,
                            std::optional<std::uint64_t> base, const std::string& actor) {
  auto op = documents::opinion_from_json(doc, store_.registry());
  if (op.id != id) throw Error(ErrorCode::InvalidDocument, "opinion id does not match path");
  return {{"id", id}, {"version", store_.save_opinion(op, base, actor)}};
}

Json Workbench::get(EntityKind kind, const std::string& id,
                    std::optional<std::uint64_t> version) const {
  return documents::parse(store_.documents().load(kind, id, version));
}

Json Workbench::versions(EntityKind kind, const std::string& id) const {
  Json out = Json::array();
  for (const auto& v : store_.documents().history(kind, id))
    out.push_back({{"version", v.version},
                   {"sha256", v.sha256},
                   {"savedAt", v.savedAt.iso()},
                   {"actor", v.actor}});
  return out;
}

Json Workbench::verify_item(const std::string& opinionId, const std::string& itemId,
                            const Json& r) {
  static constexpr std::array<opinion::Verification, 4> kAll{
      opinion::Verification::Unverified, opinion::Verification::Verified,
      opinion::Verification::Waived, opinion::Verification::Failed};
  std::string status = need(r, "status").get<std::string>();
  auto it = std::find_if(kAll.begin(), kAll.end(),
                         [&](auto v) { return opinion::name(v) == status; });
  if (it == kAll.end()) throw Error(ErrorCode::InvalidDocument, "unknown status '" + status + "'");
  Timestamp at = r.contains("at") ? Timestamp::parse(r["at"].get<std::string>())
                                  : store_.documents().now();
  auto op = store_.verify_item(opinionId, itemId, *it, need(r, "analystId").get<std::string>(), at,
                               r.value("notes", ""));
  return documents::to_json(op, store_.registry());
}

Json Workbench::put_policy(const std::string& id, const Json& doc,
                           std::optional<std::uint64_t> base, const std::string& actor) {
  return {{"id", id},
          {"version", store_.save_policy(id, documents::policy_from_json(doc), base, actor)}};
}

Json Workbench::put_facts(const std::string& id, const Json& doc,
                          std::optional<std::uint64_t> base, const std::string& actor) {
  auto facts = documents::facts_from_json(doc);
  if (facts.relationshipId != id)
    throw Error(ErrorCode::InvalidDocument, "relationshipId does not match path");
  return {{"id", id}, {"version", store_.save_facts(facts, base, actor)}};
}

determination::DeterminationInput Workbench::determination_input(const Json& r) const {
  auto reg = store_.registry();
  determination::DeterminationInput in;
  if (r.contains("facts"))
    in.facts = documents::facts_from_json(r["facts"]);
  else
    in.facts = store_.load_facts(need(r, "relationshipId").get<std::string>());

  if (r.contains("opinions"))
    for (const auto& o : r["opinions"]) in.opinions.push_back(documents::opinion_from_json(o, reg));
  if (r.contains("opinionIds"))
    for (const auto& id : r["opinionIds"]) in.opinions.push_back(store_.load_opinion(id.get<std::string>()));

  if (r.contains("policy"))
    in.policy = documents::policy_from_json(r["policy"]);
  else
    in.policy = store_.load_policy(need(r, "policyId").get<std::string>());
  if (r.contains("policyOverrides")) in.policy = apply_overrides(in.policy, r["policyOverrides"]);

  if (r.contains("assessment") && !r["assessment"].is_null())
    in.humanAssessment = documents::assessment_from_json(r["assessment"]);
  in.asOfDate = Date::parse(need(r, "asOf").get<std::string>());
  if (auto at = opt(r, "determinedAt")) in.determinedAt = Timestamp::parse(*at);
  return in;
}

Json Workbench::determine(const Json& r, const std::string& actor) {
  auto in = determination_input(r);
  auto d = determination::determine(in);
  auto version = store_.save_determination(d, actor);
  Json doc = store_.load_determination(d.relationshipId, version);
  return {{"relationshipId", d.relationshipId}, {"version", version}, {"document", doc}};
}

Json Workbench::what_if(const Json& r) const {
  return {{"trace", run_determination(determination_input(r), store_.registry())}};
}

Json Workbench::set_override(const std::string& relationshipId, const Json& r) {
  store_.set_override(relationshipId, need(r, "enabled").get<bool>(), r.value("note", ""),
                      need(r, "actor").get<std::string>());
  return store_.load_determination(relationshipId);
}

Json Workbench::event(const Json& r, const std::string& actor) {
  store::TriggerEvent e;
  e.kind = store::trigger_from_name(need(r, "kind").get<std::string>());
  e.subject = need(r, "subject").get<std::string>();
  e.occurredAt = r.contains("occurredAt") ? Timestamp::parse(r["occurredAt"].get<std::string>())
                                          : store_.documents().now();
  e.payload = r.value("payload", "");
  return {{"affected", store_.record_event(e, actor)}};
}

Json Workbench::sweep(const Json& r, const std::string& actor) {
  auto res = store_.sweep_expiry(Date::parse(need(r, "asOf").get<std::string>()),
                                 r.value("defaultValidityDays", 365), actor);
  return {{"flipped", res.flipped}, {"skippedOverride", res.skippedOverride}};
}

Json Workbench::audit(std::optional<EntityKind> kind, const std::string& id) const {
  return audit_json(kind ? store_.documents().audit_trail(*kind, id)
                         : store_.documents().audit_trail());
}

Json Workbench::verify_store() const {
  auto check = store_.documents().verify();
  return {{"ok", check.ok}, {"problem", check.problem}};
}

}  // namespace netting::workbench
