#include <benchmark/benchmark.h>

#include "netting/cnl.hpp"
#include "netting/cost_model.hpp"
#include "netting/determination.hpp"
#include "netting/documents.hpp"

namespace {

using namespace netting;

std::string data(const char* name) { return std::string(NETTING_DATA_DIR) + "/" + name; }

void BM_ParseSentence(benchmark::State& state) {
  auto reg = cnl::VocabularyRegistry::builtin();
  for (auto _ : state) {
    auto s = cnl::parse_sentence(
        "It is more likely than not that enforcement of close-out netting will not be stayed",
        reg);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_ParseSentence);

void BM_FactorRange(benchmark::State& state) {
  auto mapping = risk::LikelihoodMapping::standard();
  std::vector<cnl::Sentence> conclusion;
  for (int i = 0; i < state.range(0); ++i) {
    auto l = cnl::kLikelihoods[static_cast<std::size_t>(i) % cnl::kLikelihoods.size()];
    conclusion.push_back({l, "transactions", i % 2 ? cnl::Verb::Is : cnl::Verb::CanBe,
                          "cherry-picked"});
  }
  determination::RiskFactor f{"cherry", "transactions", "cherry-picked",
                              determination::AdverseDirection::Occurrence, 10000};
  for (auto _ : state) benchmark::DoNotOptimize(determination::factor_range(conclusion, f, mapping));
}
BENCHMARK(BM_FactorRange)->Arg(4)->Arg(64);

void BM_Determine(benchmark::State& state) {
  auto reg = cnl::VocabularyRegistry::builtin();
  determination::DeterminationInput in;
  in.opinions.push_back(
      documents::opinion_from_json(documents::read_file(data("sample_opinion.json")), reg));
  in.facts = documents::facts_from_json(documents::read_file(data("sample_facts.json")));
  in.policy =
      documents::policy_from_json(documents::read_file(data("policy_three_factor.json")));
  in.humanAssessment =
      documents::assessment_from_json(documents::read_file(data("sample_assessment.json")));
  in.asOfDate = Date::parse("2026-06-30");
  for (auto _ : state) benchmark::DoNotOptimize(determination::determine(in));
}
BENCHMARK(BM_Determine);

void BM_Trace(benchmark::State& state) {
  auto reg = cnl::VocabularyRegistry::builtin();
  determination::DeterminationInput in;
  in.opinions.push_back(
      documents::opinion_from_json(documents::read_file(data("sample_opinion.json")), reg));
  in.facts = documents::facts_from_json(documents::read_file(data("sample_facts.json")));
  in.policy =
      documents::policy_from_json(documents::read_file(data("policy_three_factor.json")));
  in.asOfDate = Date::parse("2026-06-30");
  auto d = determination::determine(in);
  for (auto _ : state) benchmark::DoNotOptimize(documents::canonical(documents::trace_to_json(d, reg)));
}
BENCHMARK(BM_Trace);

void BM_CostModel(benchmark::State& state) {
  auto levels = cost::reference_levels();
  for (auto _ : state) benchmark::DoNotOptimize(cost::total_cost(levels, Decimal::parse("1000")));
}
BENCHMARK(BM_CostModel);

}  // namespace

BENCHMARK_MAIN();
