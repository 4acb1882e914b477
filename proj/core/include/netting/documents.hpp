#pragma once

// Structured-text (JSON) document formats for every entity the workbench
// reads or writes. Field names are part of the external interface; see
// docs/formats.md. Readers throw Error(InvalidDocument) on malformed input.

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

#include "netting/cnl.hpp"
#include "netting/cost_model.hpp"
#include "netting/decimal.hpp"
#include "netting/determination.hpp"
#include "netting/exposure.hpp"
#include "netting/opinion.hpp"
#include "netting/risk_algebra.hpp"

namespace netting::documents {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

// Stable serialization: sorted keys, two-space indent, trailing newline.
std::string canonical(const Json& j);
Json parse(const std::string& text);
Json read_file(const std::string& path);

// Exact decimal from a JSON string or number (numbers go through their
// shortest round-trip text).
Decimal decimal_of(const Json& j);

Json to_json(const cnl::VocabularyRegistry& registry);
cnl::VocabularyRegistry registry_from_json(const Json& j);

// {text, likelihood, object, verb, polarity, predicate}
Json to_json(const cnl::Sentence& s, const cnl::VocabularyRegistry& registry);
// Accepts text, structure, or both (which must agree).
cnl::Sentence sentence_from_json(const Json& j, const cnl::VocabularyRegistry& registry);

Json to_json(const opinion::LegalOpinion& op, const cnl::VocabularyRegistry& registry);
opinion::LegalOpinion opinion_from_json(const Json& j, const cnl::VocabularyRegistry& registry);

Json to_json(const opinion::RelationshipFacts& facts);
opinion::RelationshipFacts facts_from_json(const Json& j);

Json to_json(const opinion::HumanAssessment& a);
opinion::HumanAssessment assessment_from_json(const Json& j);

Json to_json(const opinion::ScopeMatchResult& r);
Json to_json(const opinion::CoverageResult& r);

Json to_json(const risk::ProbRange& r);
risk::ProbRange range_from_json(const Json& j);

// Five entries keyed by likelihood id, each {loPercent, hiPercent}.
Json to_json(const risk::LikelihoodMapping& m);
risk::LikelihoodMapping mapping_from_json(const Json& j);

Json to_json(const determination::InstitutionRiskPolicy& p);
determination::InstitutionRiskPolicy policy_from_json(const Json& j);

Json to_json(const determination::FactorAssessment& a, const cnl::VocabularyRegistry& registry);

// The determination's trace payload; identical inputs give identical bytes.
Json trace_to_json(const determination::NettingDetermination& d,
                   const cnl::VocabularyRegistry& registry);
// Stored determination document: trace plus lifecycle metadata.
Json determination_document(const determination::NettingDetermination& d,
                            const cnl::VocabularyRegistry& registry);

std::vector<exposure::Trade> portfolio_from_json(const Json& j);
Json to_json(const exposure::ExposureReport& r);

std::vector<cost::LevelParams> cost_params_from_json(const Json& j);
Json to_json(const cost::CostReport& r);

}  // namespace netting::documents
