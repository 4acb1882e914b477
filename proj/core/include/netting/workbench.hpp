#pragma once

// Request/response operations shared by the CLI and the HTTP service. Every
// request and response is a JSON document; there is no logic that exists
// only behind one of the front-ends.

#include <optional>
#include <string>

#include "netting/documents.hpp"
#include "netting/store.hpp"

namespace netting::workbench {

using documents::Json;

// HTTP status for a domain error (404, 409, 400 or 422).
int http_status(ErrorCode code);
// {"error": <reason id>, "message": ..., ["span": {...}]}
Json error_body(const std::exception& e);

// {"errors": [...], "blockingReasons": [...]}: every reason id a client can see.
Json reason_ids();

Json parse_text(const std::string& text, const cnl::VocabularyRegistry& registry);
std::string render_document(const Json& sentence, const cnl::VocabularyRegistry& registry);

// Single trace path for persisted and what-if determinations.
Json run_determination(const determination::DeterminationInput& input,
                       const cnl::VocabularyRegistry& registry);

Json exposures(const Json& portfolio);
Json cost_model(const Json& params, std::optional<Decimal> dayRate);

// Applies inline overrides {thresholdBp, weights{factorId: bp}, mapping{...},
// missingFactorPolicy, emptyIntersectionPolicy, validityPeriodDays}.
determination::InstitutionRiskPolicy apply_overrides(determination::InstitutionRiskPolicy policy,
                                                     const Json& overrides);

class Workbench {
 public:
  explicit Workbench(store::LifecycleStore& store) : store_(store) {}

  store::LifecycleStore& store() { return store_; }

  // Registry document plus the closed likelihood and verb sets.
  Json vocabulary() const;
  Json add_term(const Json& request, const std::string& actor);
  Json parse(const Json& request) const;
  Json render(const Json& request) const;

  Json put_opinion(const std::string& id, const Json& doc, std::optional<std::uint64_t> base,
                   const std::string& actor);
  Json get(store::EntityKind kind, const std::string& id,
           std::optional<std::uint64_t> version) const;
  Json versions(store::EntityKind kind, const std::string& id) const;
  Json verify_item(const std::string& opinionId, const std::string& itemId, const Json& request);

  Json put_policy(const std::string& id, const Json& doc, std::optional<std::uint64_t> base,
                  const std::string& actor);
  Json put_facts(const std::string& id, const Json& doc, std::optional<std::uint64_t> base,
                 const std::string& actor);

  // Request: facts | relationshipId, opinions[] | opinionIds[], policy | policyId,
  // [policyOverrides], [assessment], asOf, [determinedAt].
  determination::DeterminationInput determination_input(const Json& request) const;
  Json determine(const Json& request, const std::string& actor);  // persisted
  Json what_if(const Json& request) const;                       // nothing persisted
  Json set_override(const std::string& relationshipId, const Json& request);

  Json event(const Json& request, const std::string& actor);
  Json sweep(const Json& request, const std::string& actor);
  Json audit(std::optional<store::EntityKind> kind, const std::string& id) const;
  Json verify_store() const;

 private:
  store::LifecycleStore& store_;
};

}  // namespace netting::workbench
