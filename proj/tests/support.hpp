#pragma once

#include <atomic>
#include <filesystem>
#include <random>
#include <string>

#include "netting/determination.hpp"
#include "netting/documents.hpp"
#include "netting/opinion.hpp"

namespace testsupport {

inline std::string data_path(const std::string& name) {
  return std::string(NETTING_DATA_DIR) + "/" + name;
}

inline netting::documents::Json data_json(const std::string& name) {
  return netting::documents::read_file(data_path(name));
}

// Fresh directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("netting-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline netting::opinion::LegalOpinion sample_opinion() {
  return netting::documents::opinion_from_json(data_json("sample_opinion.json"),
                                               netting::cnl::VocabularyRegistry::builtin());
}

inline netting::opinion::LegalOpinion verified(netting::opinion::LegalOpinion op) {
  auto at = netting::Timestamp::parse("2026-04-01T09:00:00Z");
  for (const auto& a : std::vector(op.assumptions))
    op = set_verification(op, a.id, netting::opinion::Verification::Verified, "analyst-1", at);
  for (const auto& q : std::vector(op.qualifications))
    op = set_verification(op, q.id, netting::opinion::Verification::Verified, "analyst-1", at);
  return op;
}

// Sample relationship with verified items, an acceptable assessment and the
// three-factor policy, evaluated on 2026-06-30.
inline netting::determination::DeterminationInput sample_input() {
  netting::determination::DeterminationInput in;
  in.opinions.push_back(verified(sample_opinion()));
  in.facts = netting::documents::facts_from_json(data_json("sample_facts.json"));
  in.policy = netting::documents::policy_from_json(data_json("policy_three_factor.json"));
  in.humanAssessment = netting::documents::assessment_from_json(data_json("sample_assessment.json"));
  in.asOfDate = netting::Date::parse("2026-06-30");
  return in;
}

inline std::mt19937_64 rng(std::uint64_t salt = 0) { return std::mt19937_64(0x5eedULL + salt); }

inline int uniform(std::mt19937_64& g, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(g);
}

// Random built-in sentence over the three built-in objects and predicates.
inline netting::cnl::Sentence random_sentence(std::mt19937_64& g) {
  namespace cnl = netting::cnl;
  static const char* objects[] = {"transactions", "collateral", "enforcement-of-close-out-netting"};
  static const char* predicates[] = {"cherry-picked", "enforceable", "stayed"};
  return {cnl::kLikelihoods[std::size_t(uniform(g, 0, 4))], objects[uniform(g, 0, 2)],
          cnl::kVerbs[std::size_t(uniform(g, 0, 5))], predicates[uniform(g, 0, 2)]};
}

inline netting::determination::InstitutionRiskPolicy random_policy(std::mt19937_64& g) {
  static const std::pair<const char*, const char*> pairs[] = {
      {"transactions", "cherry-picked"},
      {"collateral", "enforceable"},
      {"enforcement-of-close-out-netting", "stayed"},
      {"transactions", "stayed"}};
  using namespace netting::determination;
  InstitutionRiskPolicy p;
  int n = uniform(g, 1, 4);
  int left = 10000;
  for (int i = 0; i < n; ++i) {
    int w = i + 1 == n ? left : uniform(g, 0, left);
    left -= w;
    p.factors.push_back({"f" + std::to_string(i), pairs[i].first, pairs[i].second,
                         uniform(g, 0, 1) ? AdverseDirection::Occurrence : AdverseDirection::NonOccurrence,
                         w});
  }
  p.thresholdBp = uniform(g, 0, 10000);
  p.missingFactorPolicy =
      uniform(g, 0, 1) ? MissingFactorPolicy::TreatAsUnknown : MissingFactorPolicy::Block;
  p.emptyIntersectionPolicy =
      uniform(g, 0, 1) ? EmptyIntersectionPolicy::Block : EmptyIntersectionPolicy::WidestSentence;
  return p;
}

inline netting::determination::DeterminationInput random_input(std::mt19937_64& g) {
  auto in = sample_input();
  in.opinions[0].conclusion.clear();
  int n = uniform(g, 0, 6);
  for (int i = 0; i < n; ++i) in.opinions[0].conclusion.push_back(random_sentence(g));
  in.policy = random_policy(g);
  return in;
}

}  // namespace testsupport
